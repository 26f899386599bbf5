#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gawcga/schedules.hpp"
#include "gawcga/smoothness.hpp"

namespace gawcga {

// (a + b^q)^{1/q} <= a + b for q > 1, a >= 0, b >= 1.  A 1e-12 relative
// grace keeps round-off from flipping the equality cases (a = 0, or b = 1
// with a = 0).
inline bool lemma4_check(double q, double a, double b) {
    if (!(q > 1.0) || a < 0.0 || b < 1.0)
        throw HypothesisViolated("lemma4_check: requires q > 1, a >= 0, b >= 1");
    const double lhs = std::pow(a + std::pow(b, q), 1.0 / q);
    return lhs <= (a + b) * (1.0 + 1e-12);
}

// Index partition at level alpha over {2..horizon}:
//   Lambda1 = { n : delta_{n-1} + delta'_{n-1} >= alpha t_n^p
//               or eta_{n-1} + eta'_{n-1} >= alpha t_n^p
//               or t'_n >= alpha^{1/p} t_n },
//   Lambda2 = {2..horizon} \ Lambda1.
struct LambdaPartition {
    double alpha = 0.0;
    std::vector<std::size_t> lambda1;
    std::vector<std::size_t> lambda2;
    double lambda1_density = 0.0;        // |Lambda1| / (horizon - 1)
    double lambda2_tp_sum = 0.0;         // sum over Lambda2 of t_n^p
    double lambda2_tp_tail = 0.0;        // same, over n > horizon/2
};

inline LambdaPartition lambda_partition(const Schedules& sched, double p,
                                        std::size_t horizon, double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("lambda_partition: alpha must be > 0");
    if (horizon < 2)
        throw std::invalid_argument("lambda_partition: horizon must be >= 2");
    LambdaPartition part;
    part.alpha = alpha;
    for (std::size_t n = 2; n <= horizon; ++n) {
        const double tn = sched.t_at(n);
        const double tp = std::pow(tn, p);
        const bool in_l1 =
            sched.delta_at(n - 1) + sched.delta_prime_at(n - 1) >= alpha * tp ||
            sched.eta_at(n - 1) + sched.eta_prime_at(n - 1) >= alpha * tp ||
            sched.t_prime_at(n) >= std::pow(alpha, 1.0 / p) * tn;
        if (in_l1) {
            part.lambda1.push_back(n);
        } else {
            part.lambda2.push_back(n);
            part.lambda2_tp_sum += tp;
            if (n > horizon / 2) part.lambda2_tp_tail += tp;
        }
    }
    part.lambda1_density =
        static_cast<double>(part.lambda1.size()) / static_cast<double>(horizon - 1);
    return part;
}

// Greedy subsequence extraction: scan n = 1..horizon, accept n when
// a_n <= eps * b_n, with eps = 1 initially and eps = 1/k after the k-th
// acceptance.  When sum a < oo and sum b = oo this finds a subsequence with
// sum b_{n_k} = oo and a_{n_k} = o(b_{n_k}); at a finite horizon the partial
// sums are reported as-is (a summable b makes them plateau).
struct SubsequenceResult {
    std::vector<std::size_t> indices;      // accepted n (1-based)
    std::vector<double> b_partial_sums;    // running sum of b over accepted
    double b_total = 0.0;
    double b_second_half = 0.0;            // accepted contribution with n > horizon/2
};

inline SubsequenceResult find_subsequence(const std::vector<double>& a,
                                          const std::vector<double>& b,
                                          std::size_t horizon) {
    if (a.size() < horizon || b.size() < horizon)
        throw std::invalid_argument("find_subsequence: sequences shorter than horizon");
    SubsequenceResult res;
    double eps = 1.0;
    std::size_t accepted = 0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const double an = a[n - 1];
        const double bn = b[n - 1];
        if (an < 0.0 || bn < 0.0)
            throw std::invalid_argument("find_subsequence: sequences must be non-negative");
        if (an <= eps * bn) {
            res.indices.push_back(n);
            res.b_total += bn;
            if (n > horizon / 2) res.b_second_half += bn;
            res.b_partial_sums.push_back(res.b_total);
            ++accepted;
            eps = 1.0 / static_cast<double>(accepted);
        }
    }
    return res;
}

// Partial-sum growth proxy at the horizon: a sum is flagged divergent when
// its second half still contributes more than the Cauchy-tail threshold.
inline constexpr double kCauchyTailThreshold = 1e-8;

struct SubsequenceFlags {
    std::size_t count = 0;
    double b_sum = 0.0;
    double b_second_half = 0.0;
    bool sum_diverging = false;   // second-half contribution above threshold
    double late_ratio_max = 0.0;  // max a_n/b_n over the accepted second half
};

// One Theorem-2-style condition family evaluated along a jointly found
// candidate subsequence.
struct ConditionReport {
    std::size_t horizon = 0;
    double p = 0.0;
    std::string note;

    std::vector<LambdaPartition> per_alpha;

    // Joint candidate subsequence for the power-family conditions:
    // accept n when every inaccuracy is <= eps * t_{n+1}^p (and t'_{n+1} <=
    // eps * t_{n+1}), eps = 1/k after k acceptances.
    std::vector<std::size_t> candidate_subsequence;
    SubsequenceFlags power_family;         // b_n = t_{n+1}^p
    bool tprime_small_along_candidate = false;

    // Same machinery with b_n = t_{n+1} xi_{n+1} for theta in the grid.
    struct ThetaFamily {
        double theta = 0.0;
        SubsequenceFlags flags;
    };
    std::vector<ThetaFamily> theta_families;

    // Corollary presets.
    double liminf_t_estimate = 0.0;          // min t_n over the second half
    double liminf_error_sum_estimate = 0.0;  // min of t'_{n+1}+delta_n+delta'_n+eta_n
    bool corollary1_favorable = false;
    bool errors_in_l1 = false;               // all five error sums Cauchy at horizon
    bool corollary3_favorable = false;       // errors_in_l1 and sum t^p diverging
};

namespace detail {

inline SubsequenceFlags flags_along(const std::vector<std::size_t>& accepted,
                                    const std::vector<double>& a_worst,
                                    const std::vector<double>& b,
                                    std::size_t horizon) {
    SubsequenceFlags f;
    f.count = accepted.size();
    for (std::size_t n : accepted) {
        f.b_sum += b[n - 1];
        if (n > horizon / 2) {
            f.b_second_half += b[n - 1];
            if (b[n - 1] > 0.0)
                f.late_ratio_max = std::max(f.late_ratio_max, a_worst[n - 1] / b[n - 1]);
        }
    }
    f.sum_diverging = f.b_second_half > kCauchyTailThreshold;
    return f;
}

}  // namespace detail

// Finite-horizon evaluation of the convergence-condition families: the
// Lambda1/Lambda2 partitions per alpha, a greedy candidate subsequence, the
// partial sums along it, and the corollary presets.  Everything here is a
// diagnostic at the stated horizon; it cannot decide the infinite-limit
// conditions, and the report says so.
inline ConditionReport check_conditions(const Schedules& sched, double p,
                                        std::size_t horizon,
                                        const std::vector<double>& alpha_grid) {
    if (horizon < 2)
        throw std::invalid_argument("check_conditions: horizon must be >= 2");
    if (!(p > 1.0))
        throw ExponentOutOfRange("check_conditions: requires p > 1");
    ConditionReport rep;
    rep.horizon = horizon;
    rep.p = p;
    rep.note =
        "finite-horizon diagnostic at horizon " + std::to_string(horizon) +
        ": partial sums and index densities only; the infinite-limit "
        "conditions are not decidable from this data";

    for (double alpha : alpha_grid)
        rep.per_alpha.push_back(lambda_partition(sched, p, horizon, alpha));

    // Joint greedy subsequence over n = 1..horizon-1 (conditions look at
    // t_{n+1} and the errors at n).
    std::vector<double> tp(horizon, 0.0), err_worst(horizon, 0.0);
    for (std::size_t n = 1; n + 1 <= horizon; ++n) {
        const double tn1 = sched.t_at(n + 1);
        tp[n - 1] = std::pow(tn1, p);
        err_worst[n - 1] = std::max(
            {sched.delta_at(n), sched.delta_prime_at(n), sched.eta_at(n),
             sched.eta_prime_at(n)});
    }
    {
        double eps = 1.0;
        std::size_t accepted = 0;
        for (std::size_t n = 1; n + 1 <= horizon; ++n) {
            const double tn1 = sched.t_at(n + 1);
            const bool ok = err_worst[n - 1] <= eps * tp[n - 1] &&
                            sched.t_prime_at(n + 1) <= eps * tn1;
            if (ok) {
                rep.candidate_subsequence.push_back(n);
                ++accepted;
                eps = 1.0 / static_cast<double>(accepted);
            }
        }
    }
    rep.power_family =
        detail::flags_along(rep.candidate_subsequence, err_worst, tp, horizon);
    {
        bool small = true;
        std::size_t late = 0;
        for (std::size_t n : rep.candidate_subsequence) {
            if (n <= horizon / 2) continue;
            ++late;
            const double tn1 = sched.t_at(n + 1);
            if (tn1 > 0.0 && sched.t_prime_at(n + 1) / tn1 > 0.5) small = false;
        }
        rep.tprime_small_along_candidate = small && late > 0;
    }

    // Theta grid: same conditions with b_n = t_{n+1} xi_{n+1}, xi from the
    // power-type upper bound with the dual exponent q = p/(p-1).
    const double q_dual = p / (p - 1.0);
    const SmoothnessModel model = SmoothnessModel::lp_upper_bound(q_dual);
    for (double theta : {0.5, 0.25, 0.125}) {
        ConditionReport::ThetaFamily fam;
        fam.theta = theta;
        std::vector<double> txi(horizon, 0.0);
        for (std::size_t n = 1; n + 1 <= horizon; ++n) {
            const double tn1 = sched.t_at(n + 1);
            txi[n - 1] = tn1 <= 0.0 ? 0.0 : tn1 * xi_solve(model, theta, tn1);
        }
        std::vector<std::size_t> accepted;
        double eps = 1.0;
        std::size_t count = 0;
        for (std::size_t n = 1; n + 1 <= horizon; ++n) {
            const double tn1 = sched.t_at(n + 1);
            const bool ok = err_worst[n - 1] <= eps * txi[n - 1] &&
                            sched.t_prime_at(n + 1) <= eps * tn1;
            if (ok) {
                accepted.push_back(n);
                ++count;
                eps = 1.0 / static_cast<double>(count);
            }
        }
        fam.flags = detail::flags_along(accepted, err_worst, txi, horizon);
        rep.theta_families.push_back(std::move(fam));
    }

    // Corollary presets.
    double tmin = 1.0, errmin = std::numeric_limits<double>::infinity();
    for (std::size_t n = horizon / 2 + 1; n <= horizon; ++n)
        tmin = std::min(tmin, sched.t_at(n));
    for (std::size_t n = horizon / 2; n + 1 <= horizon; ++n)
        errmin = std::min(errmin, sched.t_prime_at(n + 1) + sched.delta_at(n) +
                                      sched.delta_prime_at(n) + sched.eta_at(n));
    rep.liminf_t_estimate = tmin;
    rep.liminf_error_sum_estimate = errmin;
    rep.corollary1_favorable = tmin > 0.0 && errmin <= kCauchyTailThreshold;

    auto second_half_sum = [&](auto&& value_at) {
        double s = 0.0;
        for (std::size_t n = horizon / 2 + 1; n <= horizon; ++n) s += value_at(n);
        return s;
    };
    rep.errors_in_l1 =
        second_half_sum([&](std::size_t n) { return sched.t_prime_at(n); }) <
            kCauchyTailThreshold &&
        second_half_sum([&](std::size_t n) { return sched.delta_at(n); }) <
            kCauchyTailThreshold &&
        second_half_sum([&](std::size_t n) { return sched.delta_prime_at(n); }) <
            kCauchyTailThreshold &&
        second_half_sum([&](std::size_t n) { return sched.eta_at(n); }) <
            kCauchyTailThreshold &&
        second_half_sum([&](std::size_t n) { return sched.eta_prime_at(n); }) <
            kCauchyTailThreshold;
    const double tp_second_half =
        second_half_sum([&](std::size_t n) { return std::pow(sched.t_at(n), p); });
    rep.corollary3_favorable = rep.errors_in_l1 && tp_second_half > kCauchyTailThreshold;

    return rep;
}

}  // namespace gawcga
