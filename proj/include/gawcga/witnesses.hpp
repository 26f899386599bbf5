#pragma once

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "gawcga/conditions.hpp"
#include "gawcga/engine.hpp"

namespace gawcga {

struct WitnessCheckResult {
    bool passed = true;
    std::vector<std::string> details;

    void require(bool ok, const std::string& what) {
        if (!ok) passed = false;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

// A packaged divergence construction: space, dictionary, element, schedules
// and realization, plus the predicate its run must satisfy.  "Diverges" is
// operationalized at the finite horizon as "residual bounded below by
// divergence_floor for all computed steps".
struct Witness {
    Space space;
    Dictionary dict;
    Element f;
    Schedules sched;
    RealizationPolicy policy;
    std::size_t max_steps = 0;
    double stop_tol = 0.0;
    ProjectionOptions projection;
    double divergence_floor = 0.0;
    std::function<WitnessCheckResult(const Trace&)> expected;
    std::string provenance;
};

struct WitnessRun {
    Trace trace;
    WitnessCheckResult check;
};

inline WitnessRun run_witness(const Witness& w) {
    EngineOptions opts;
    opts.max_steps = w.max_steps;
    opts.stop_tol = w.stop_tol;
    opts.projection = w.projection;
    WitnessRun out;
    out.trace = run_gawcga(w.space, w.dict, w.f, w.sched, w.policy, opts);
    out.check = w.expected(out.trace);
    return out;
}

namespace detail {

inline void require_audits(WitnessCheckResult& res, const Space& space,
                           const Element& f, const Schedules& sched,
                           const Trace& trace) {
    double worst = 0.0;
    for (const auto& a : audit_trace(space, f, sched, trace))
        worst = std::min({worst, a.margin_functional, a.margin_select, a.margin_approx});
    std::ostringstream msg;
    msg << "all step audits pass (worst margin " << worst << ")";
    res.require(worst >= -kAuditTol, msg.str());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Unbounded error sequence: eta_{n_k} = alpha k (and eta'_{n_k} = alpha) on a
// spike subsequence.  The element carries a non-increasing profile a_j with
// a_1 = alpha and blockwise tails >= 1/k; the realization adds an alpha*e_1
// spike to the exact approximant at the spike steps, which the eta slack
// admits, so ||f_{n_k}|| >= alpha at every spike while the zero-slack run on
// the same element converges.
inline Witness witness_unbounded_eta(double q, double alpha,
                                     std::vector<std::size_t> spikes,
                                     std::size_t horizon) {
    if (!(alpha > 0.0))
        throw ConstructionInvalid("witness_unbounded_eta: alpha must be > 0");
    LqSpace lq(q);
    if (spikes.empty())
        throw ConstructionInvalid("witness_unbounded_eta: need at least one spike index");
    for (std::size_t i = 0; i + 1 < spikes.size(); ++i) {
        if (spikes[i + 1] <= spikes[i])
            throw ConstructionInvalid("witness_unbounded_eta: spikes must increase");
        if (i + 2 < spikes.size() &&
            spikes[i + 2] - spikes[i + 1] < spikes[i + 1] - spikes[i])
            throw ConstructionInvalid("witness_unbounded_eta: gaps must be non-decreasing");
    }
    while (!spikes.empty() && spikes.back() > horizon) spikes.pop_back();
    if (spikes.empty() || spikes.front() < 1)
        throw ConstructionInvalid("witness_unbounded_eta: spikes outside {1..horizon}");

    // Blockwise profile: a_j = alpha up to the first spike; on each block
    // (n_k, n_{k+1}] the level d_k = (1/k) gap^{-1/q} makes the block's
    // q-mass exactly 1/k; clipping keeps the profile non-increasing.
    std::vector<double> a(horizon + 1, 0.0);
    for (std::size_t j = 1; j <= std::min(spikes.front(), horizon); ++j) a[j] = alpha;
    double level = alpha;
    for (std::size_t k = 1; k <= spikes.size(); ++k) {
        const std::size_t lo = spikes[k - 1];
        const std::size_t hi = k < spikes.size() ? spikes[k] : horizon;
        if (hi <= lo) continue;
        const double gap = static_cast<double>(hi - lo);
        const double d =
            std::min(level, (1.0 / static_cast<double>(k)) * std::pow(gap, -1.0 / q));
        for (std::size_t j = lo + 1; j <= hi; ++j) a[j] = d;
        level = d;
    }

    // Validate the defining inequalities up to the horizon.
    if (a[1] < alpha)
        throw ConstructionInvalid("witness_unbounded_eta: a_1 < alpha after clipping");
    for (std::size_t j = 2; j <= horizon; ++j)
        if (a[j] > a[j - 1] + 1e-15)
            throw ConstructionInvalid("witness_unbounded_eta: profile not non-increasing");
    for (std::size_t k = 1; k <= spikes.size(); ++k) {
        if (spikes[k - 1] >= horizon) continue;  // no in-horizon tail left
        double tail_q = 0.0;
        for (std::size_t j = spikes[k - 1] + 1; j <= horizon; ++j)
            tail_q += std::pow(a[j], q);
        const double tail = std::pow(tail_q, 1.0 / q);
        if (tail < 1.0 / static_cast<double>(k) - 1e-12) {
            std::ostringstream msg;
            msg << "witness_unbounded_eta: tail after spike " << k << " is " << tail
                << " < 1/" << k << "; enlarge the gaps between spikes";
            throw ConstructionInvalid(msg.str());
        }
    }

    Element f;
    for (std::size_t j = 1; j <= horizon; ++j) f.set(j, a[j]);

    Space space{lq};
    Witness w{space,
              Dictionary::canonical(space, 0, horizon),
              f,
              Schedules{},
              RealizationPolicy{},
              horizon,
              0.0,
              ProjectionOptions{},
              alpha,
              nullptr,
              ""};

    w.sched.eta = IndicatorSeq{spikes, 0.0, alpha};        // eta_{n_k} = alpha k
    w.sched.eta_prime = IndicatorSeq{spikes, alpha, 0.0};  // eta'_{n_k} = alpha

    std::set<std::size_t> spike_set(spikes.begin(), spikes.end());
    w.policy.name = "unbounded-eta-spike";
    w.policy.approximant_rule = [spike_set, alpha](const ApproximantContext& ctx) {
        Element g = *ctx.g_exact;
        if (spike_set.count(ctx.step)) g.set(1, g[1] + alpha);
        return g;
    };

    const Schedules sched_copy = w.sched;
    w.expected = [space, f, sched_copy, spikes, alpha](const Trace& trace) {
        WitnessCheckResult res;
        for (std::size_t k = 0; k < spikes.size(); ++k) {
            const std::size_t n = spikes[k];
            if (n > trace.steps.size()) break;
            std::ostringstream msg;
            msg << "||f_" << n << "|| = " << trace.steps[n - 1].residual_norm
                << " >= alpha = " << alpha;
            res.require(trace.steps[n - 1].residual_norm >= alpha - 1e-12, msg.str());
        }
        detail::require_audits(res, space, f, sched_copy, trace);
        return res;
    };
    std::ostringstream prov;
    prov << "unbounded error sequence on spikes {";
    for (std::size_t k = 0; k < spikes.size(); ++k)
        prov << (k ? "," : "") << spikes[k];
    prov << "}, alpha = " << alpha << ", q = " << q << ", horizon " << horizon
         << " (finite truncation)";
    w.provenance = prov.str();
    return w;
}

// ---------------------------------------------------------------------------
// Summable t^p (finite Lambda1 case): f = e_0 + sum_j t_j^{p/q} e_j.  The
// realization prefers e_n at step n, which sits exactly on the weak-selection
// boundary because the norming functional's coordinate there is t_n times the
// e_0 coordinate; e_0 is never taken (audited, not assumed) and the residual
// never falls below 1.
inline Witness witness_finite_lambda1(double q, SequenceSpec t_spec,
                                      std::size_t horizon) {
    LqSpace lq(q);
    const double p = lq.p;

    double tail = 0.0;
    for (std::size_t n = horizon / 2 + 1; n <= horizon; ++n)
        tail += std::pow(eval_sequence(t_spec, n), p);
    if (tail >= kCauchyTailThreshold)
        throw ConstructionInvalid(
            "witness_finite_lambda1: t^p partial sums do not exhibit convergence "
            "at the horizon (second-half sum " +
            std::to_string(tail) + ")");

    Element f = Element::basis(0);
    for (std::size_t j = 1; j <= horizon; ++j) {
        const double tj = eval_sequence(t_spec, j);
        if (tj > 0.0) f.set(j, std::pow(tj, p / q));
    }

    Space space{lq};
    Witness w{space,
              Dictionary::canonical(space, 0, horizon),
              f,
              Schedules::zero_slack(t_spec),
              RealizationPolicy{},
              horizon,
              0.0,
              ProjectionOptions{},
              1.0,
              nullptr,
              ""};

    w.policy.name = "finite-lambda1";
    w.policy.atom_rule = [](const SelectionContext& ctx) {
        SelectedAtom pref{Element::basis(ctx.step), ctx.step, +1};
        if (apply(*ctx.functional, pref.atom) >=
            ctx.t * ctx.sup_value - ctx.t_prime - kWeakSelectGrace)
            return pref;
        return *ctx.argmax;
    };

    const Schedules sched_copy = w.sched;
    w.expected = [space, f, sched_copy](const Trace& trace) {
        WitnessCheckResult res;
        bool e0_selected = false;
        double min_norm = std::numeric_limits<double>::infinity();
        for (const auto& rec : trace.steps) {
            if (rec.atom_index == 0) e0_selected = true;
            min_norm = std::min(min_norm, rec.residual_norm);
        }
        res.require(!e0_selected, "e_0 is never selected up to the horizon");
        std::ostringstream msg;
        msg << "min ||f_n|| = " << min_norm << " >= 1";
        res.require(min_norm >= 1.0 - 1e-9, msg.str());
        detail::require_audits(res, space, f, sched_copy, trace);
        return res;
    };
    w.provenance =
        "summable t^p: f = e_0 + sum t_j^{p/q} e_j, q = " + std::to_string(q) +
        ", horizon " + std::to_string(horizon) + " (finite truncation)";
    return w;
}

// ---------------------------------------------------------------------------
// Infinite Lambda1 case: inaccuracies dominate t_n^p on infinitely many
// steps.  The element concentrates alpha-scaled mass on the first
// ceil(1/alpha) indices of Lambda1 plus the t^{p/q} profile on Lambda2; the
// realization installs the explicit perturbed functionals (weight
// (delta+delta')^{1/p} on e_0 and (eta+eta')^{1/p} on e_1), selects e_n on
// Lambda2 steps and e_0/e_1 on Lambda1 steps, and keeps the residual at or
// above beta forever.
inline Witness witness_infinite_lambda1(double q, const Schedules& sched,
                                        double alpha, std::size_t horizon) {
    LqSpace lq(q);
    const double p = lq.p;
    if (!(alpha > 0.0))
        throw ConstructionInvalid("witness_infinite_lambda1: alpha must be > 0");

    const LambdaPartition part = lambda_partition(sched, p, horizon, alpha);
    const std::size_t need = static_cast<std::size_t>(std::ceil(1.0 / alpha));
    if (part.lambda1.size() < need) {
        std::ostringstream msg;
        msg << "witness_infinite_lambda1: Lambda1 has " << part.lambda1.size()
            << " elements below the horizon, fewer than ceil(1/alpha) = " << need
            << " (with all errors zero no counterexample exists)";
        throw ConstructionInvalid(msg.str());
    }
    if (part.lambda2_tp_tail >= kCauchyTailThreshold)
        throw ConstructionInvalid(
            "witness_infinite_lambda1: sum of t^p over Lambda2 does not exhibit "
            "convergence at the horizon");

    std::set<std::size_t> a_support(part.lambda1.begin(),
                                    part.lambda1.begin() + need);
    std::set<std::size_t> lambda2(part.lambda2.begin(), part.lambda2.end());
    lambda2.insert(1);

    const double eta0 = sched.eta_sup(horizon);
    const double eta0p = sched.eta_prime_sup(horizon);
    double s2 = 0.0;
    for (std::size_t j : lambda2) s2 += std::pow(sched.t_at(j), p);
    const double beta = std::pow(
        eta0 + eta0p + alpha * (static_cast<double>(need) + s2), -1.0 / q);
    const double amp = std::pow(alpha, 1.0 / q) * beta;

    Element f;
    for (std::size_t j : a_support) f.set(j, amp);
    for (std::size_t j : lambda2) {
        const double tj = sched.t_at(j);
        if (tj > 0.0) f.set(j, amp * std::pow(tj, p / q));
    }

    Space space{lq};
    Witness w{space,
              Dictionary::canonical(space, 0, horizon),
              f,
              sched,
              RealizationPolicy{},
              horizon,
              0.0,
              ProjectionOptions{},
              beta,
              nullptr,
              ""};

    w.policy.name = "infinite-lambda1";
    w.policy.functional_rule = [lq, sched, a_support, lambda2, alpha, beta,
                                p](std::size_t step, const Element& f_prev) {
        if (step == 1) return lq_norming_functional(lq, f_prev);
        const std::size_t n = step - 1;
        const double d = sched.delta_at(n);
        const double dp = sched.delta_prime_at(n);
        const double e = sched.eta_at(n);
        const double ep = sched.eta_prime_at(n);
        const double fn_norm = lq_norm(lq, f_prev);
        const double a_n = std::pow(
            std::pow(beta, -lq.q) * (1.0 + d + dp) * std::pow(fn_norm, lq.q),
            -1.0 / p);
        Element coeffs;
        if (d + dp > 0.0) coeffs.set(0, std::pow(d + dp, 1.0 / p) * a_n);
        if (e + ep > 0.0) coeffs.set(1, std::pow(e + ep, 1.0 / p) * a_n);
        const double root_alpha = std::pow(alpha, 1.0 / p);
        for (std::size_t j : a_support) coeffs.set(j, root_alpha * a_n);
        for (std::size_t j : lambda2) {
            if (j < 2 || f_prev[j] == 0.0) continue;  // only the unchosen part
            coeffs.set(j, root_alpha * sched.t_at(j) * a_n);
        }
        return Functional(std::move(coeffs));
    };
    w.policy.atom_rule = [lambda2](const SelectionContext& ctx) {
        if (lambda2.count(ctx.step))
            return SelectedAtom{Element::basis(ctx.step), ctx.step, +1};
        const double target = ctx.t * ctx.sup_value - ctx.t_prime;
        for (std::size_t idx : {std::size_t{0}, std::size_t{1}}) {
            SelectedAtom cand{Element::basis(idx), idx, +1};
            if (apply(*ctx.functional, cand.atom) >= target - kWeakSelectGrace)
                return cand;
        }
        return *ctx.argmax;
    };
    {
        const Element f_copy = f;
        const Schedules sched_copy = sched;
        w.policy.approximant_rule = [f_copy, sched_copy, a_support, lambda2, amp,
                                     beta, p, q](const ApproximantContext& ctx) {
            const std::size_t n1 = ctx.step;
            std::set<std::size_t> chosen(ctx.selected_indices->begin(),
                                         ctx.selected_indices->end());
            Element remainder;
            const double head = beta * std::pow(sched_copy.eta_at(n1) +
                                                    sched_copy.eta_prime_at(n1),
                                                1.0 / q);
            if (head > 0.0) remainder.set(1, head);
            for (std::size_t j : a_support) remainder.set(j, amp);
            for (std::size_t j : lambda2) {
                if (j < 2 || chosen.count(j)) continue;
                const double tj = sched_copy.t_at(j);
                if (tj > 0.0) remainder.set(j, amp * std::pow(tj, p / q));
            }
            return f_copy - remainder;
        };
    }

    {
        const Element f_copy = f;
        const Schedules sched_copy = sched;
        const double floor = beta;
        w.expected = [space, f_copy, sched_copy, floor](const Trace& trace) {
            WitnessCheckResult res;
            double min_norm = std::numeric_limits<double>::infinity();
            for (const auto& rec : trace.steps)
                min_norm = std::min(min_norm, rec.residual_norm);
            std::ostringstream msg;
            msg << "min ||f_n|| = " << min_norm << " >= beta = " << floor;
            res.require(min_norm >= floor - 1e-9, msg.str());

            // the proof's functional inequalities, re-verified explicitly
            const LqSpace& lqs = std::get<LqSpace>(space);
            Element f_prev = f_copy;
            double worst_dual = 0.0, worst_value = 0.0;
            for (const auto& rec : trace.steps) {
                const std::size_t n = rec.step;
                worst_dual = std::max(worst_dual, lq_dual_norm(lqs, rec.functional) - 1.0);
                const double lower =
                    (1.0 - sched_copy.delta_at(n - 1)) * lq_norm(lqs, f_prev) -
                    sched_copy.delta_prime_at(n - 1);
                worst_value =
                    std::max(worst_value, lower - apply(rec.functional, f_prev));
                f_prev = rec.residual;
            }
            res.require(worst_dual <= kAuditTol, "||F_n||_p <= 1 at every step");
            res.require(worst_value <= kAuditTol,
                        "F_n(f_n) >= (1-delta_n)||f_n|| - delta'_n at every step");
            detail::require_audits(res, space, f_copy, sched_copy, trace);
            return res;
        };
    }
    std::ostringstream prov;
    prov << "infinite Lambda1 at alpha = " << alpha << ": |Lambda1| = "
         << part.lambda1.size() << " within horizon " << horizon
         << ", beta = " << beta << ", q = " << q << " (finite truncation)";
    w.provenance = prov.str();
    return w;
}

// ---------------------------------------------------------------------------
// The divergence run in the smooth-but-not-uniformly-smooth space X.

// Exact structure of the best approximation of e_1 from span{g_1..g_m}:
// minimizing ||c||_X over the affine slice sum_k (-1)^{k-1} c_k = 1 (the
// residual identity of the g-chain).  The optimal direction is scale-free,
// so one log-space pass computes the profile
//   lambda_{k+1} = ((p_k - 1) lambda_k + (p_{k+1} - p_k) ln theta_k) / (p_{k+1} - 1)
// and the constraint fixes c_1 = 1 / sum e^{lambda_k}.  By duality the error
// is E_m = 1 / nu_{m+1}(1,...,1): the norming functional of the residual has
// alternating coefficients of that same magnitude.  Coordinates below the
// double-precision range underflow to zero; their true values are
// exp(lambda_k)/S with lambda_k recorded here.
struct GChainProfile {
    Element residual;                 // alternating signs, c_1 > 0
    std::vector<double> log_coords;   // ln|c_k|, k = 1..m+1 (exact in log space)
    double error = 0.0;               // E_m = theta_{m+1}(residual)
    double error_dual_route = 0.0;    // 1 / nu_{m+1}(ones): must agree
};

inline GChainProfile solve_g_chain_profile(const SmoothSpaceX& x, std::size_t m) {
    if (m + 1 > x.horizon())
        throw HorizonExceeded("solve_g_chain_profile: m+1 exceeds horizon");
    std::vector<double> lambda(m + 2, 0.0);  // lambda[k], k = 1..m+1; lambda[1] = 0
    double theta = 1.0;                      // theta_k of the unscaled shape
    double sum = std::exp(lambda[1]);
    for (std::size_t k = 1; k <= m; ++k) {
        lambda[k + 1] = ((x.p(k) - 1.0) * lambda[k] +
                         (x.p(k + 1) - x.p(k)) * std::log(theta)) /
                        (x.p(k + 1) - 1.0);
        theta = lp_pair(theta, std::exp(lambda[k + 1]), x.p(k + 1));
        sum += std::exp(lambda[k + 1]);
    }
    GChainProfile prof;
    prof.log_coords.resize(m + 1);
    const double log_sum = std::log(sum);
    for (std::size_t k = 1; k <= m + 1; ++k) {
        prof.log_coords[k - 1] = lambda[k] - log_sum;
        const double mag = std::exp(prof.log_coords[k - 1]);
        if (mag > 0.0) prof.residual.set(k, (k % 2 == 1) ? mag : -mag);
    }
    prof.error = theta / sum;

    Element ones;
    for (std::size_t k = 1; k <= m + 1; ++k) ones.set(k, 1.0);
    prof.error_dual_route = 1.0 / x.nu_dual_norm(ones, m + 1);
    return prof;
}

// The unique norming functional of the g-chain residual at step m:
// alternating coefficients of magnitude E_{m-1} = 1/nu_m(1,..,1) on {1..m}.
inline Functional g_chain_norming_functional(const SmoothSpaceX& x, std::size_t m) {
    Element ones;
    for (std::size_t k = 1; k <= m; ++k) ones.set(k, 1.0);
    const double v = 1.0 / x.nu_dual_norm(ones, m);
    Element coeffs;
    for (std::size_t k = 1; k <= m; ++k) coeffs.set(k, (k % 2 == 1) ? v : -v);
    return Functional(std::move(coeffs), 1.0);
}

// WCGA(t=1) on f = e_1 over the g-dictionary: the norming functional ties
// g_0 against g_m and the smaller norm of g_m forces phi_m = ±g_m/||g_m||_X
// at every step, so the span never captures e_1 and
// ||f_n||_X >= rho ||f_n||_1 >= rho forever.
//
// The realization computes the projection and the norming functional by the
// g-chain structure above: past step ~7 the residual coefficients decay like
// exp(-0.3 * 2^k), far below what coordinate subtraction in doubles can
// carry, so the generic solver route cannot be certified there (it is
// cross-checked against this one at small m in the tests).
inline Witness witness_smooth_space_divergence(const PSeqSpec& pseq, std::size_t kmax) {
    const std::size_t horizon = std::max<std::size_t>(kmax + 1, 3);
    SmoothSpaceX x(pseq, horizon);
    Space space{x};

    Witness w{space,
              Dictionary::g_dictionary(x, kmax),
              Element::basis(1),
              Schedules{},
              RealizationPolicy{},
              kmax,
              0.0,
              ProjectionOptions{},
              x.equivalence_constant(),
              nullptr,
              ""};

    w.policy.name = "smooth-space-exact";
    w.policy.functional_rule = [x](std::size_t step, const Element& f_prev) {
        return g_chain_norming_functional(x, std::max(f_prev.max_index(), step));
    };
    w.policy.projection_rule = [x](const ProjectionContext& ctx) {
        const GChainProfile prof = solve_g_chain_profile(x, ctx.step);
        Projection proj;
        proj.method = "g-chain-closed-form";
        proj.error = prof.error;
        proj.approximant = *ctx.f - prof.residual;
        // back out the span coefficients (atoms are bidiagonal in coordinates)
        const std::size_t m = ctx.span->size();
        proj.coefficients.assign(m, 0.0);
        double carried = 0.0;
        for (std::size_t j = 1; j <= m; ++j) {
            const Element& atom = ctx.span->atoms[j - 1];
            proj.coefficients[j - 1] =
                (proj.approximant[j] - carried) / atom[j];
            carried = proj.coefficients[j - 1] * atom[j + 1];
        }
        return proj;
    };

    const double rho = x.equivalence_constant();
    w.expected = [x, space, rho, kmax](const Trace& trace) {
        WitnessCheckResult res;
        {
            std::ostringstream msg;
            msg << "ran all " << kmax << " steps";
            res.require(trace.steps.size() == kmax, msg.str());
        }

        bool atoms_ok = true;
        double min_norm = std::numeric_limits<double>::infinity();
        for (const auto& rec : trace.steps) {
            if (rec.atom_index != rec.step) atoms_ok = false;
            min_norm = std::min(min_norm, rec.residual_norm);
        }
        res.require(atoms_ok, "selected atom at step m is ±g_m/||g_m|| for every m");
        {
            std::ostringstream msg;
            msg << "min ||f_n||_X = " << min_norm << " >= rho - 1e-9, rho = " << rho;
            res.require(min_norm >= rho - 1e-9, msg.str());
        }

        // c_k recursion on each step's residual, over the coordinates that
        // double precision can represent (the rest underflow; their count is
        // itself checked).
        bool recursion_ok = true, enough_coords = true;
        double worst_rel = 0.0;
        for (std::size_t m = 2; m <= trace.steps.size(); ++m) {
            const Element& r = trace.steps[m - 2].residual;  // f_{m-1}, support {1..m}
            const double c1 = std::fabs(r[1]);
            if (c1 == 0.0) {
                recursion_ok = false;
                continue;
            }
            std::size_t representable = 0;
            double product = 1.0;  // prod_{n=2}^{k-1} theta_n^{p_{n+1}-p_n}
            for (std::size_t k = 2; k <= m; ++k) {
                if (k > 2)
                    product *= std::pow(x.theta_norm(r, k - 1),
                                        x.p(k) - x.p(k - 1));
                const double ck = std::fabs(r[k]);
                if (ck == 0.0) continue;
                ++representable;
                const double lhs = std::pow(ck, x.p(k) - 1.0);
                const double rhs = std::pow(c1, x.p(2) - 1.0) * product;
                worst_rel = std::max(worst_rel,
                                     std::fabs(lhs - rhs) / std::max(lhs, rhs));
            }
            if (representable + 1 < std::min<std::size_t>(m, 12)) enough_coords = false;
        }
        {
            std::ostringstream msg;
            msg << "c_k recursion holds to " << worst_rel
                << " relative over representable coordinates (tolerance 1e-6)";
            res.require(recursion_ok && worst_rel <= 1e-6, msg.str());
        }
        res.require(enough_coords,
                    "at least min(m,12) coordinates stay inside double range");

        // the g_0 / g_m tie, resolved by the norm comparison
        Element g0 = Element::dense({1.0, 1.0, 1.0}, 1);
        bool tie_ok = true;
        for (const auto& rec : trace.steps) {
            const std::size_t m = rec.step;
            Element gm;
            gm.set(m, 1.0);
            gm.set(m + 1, 1.0);
            const double v0 = std::fabs(apply(rec.functional, g0));
            const double vm = std::fabs(apply(rec.functional, gm));
            if (m == 2) {
                if (v0 > 1e-8) tie_ok = false;  // degenerate step: c_3(f_1) = 0
            } else {
                if (std::fabs(v0 - vm) > 1e-8 * std::max(1.0, vm)) tie_ok = false;
            }
        }
        res.require(tie_ok,
                    "|F^m(g_0)| = |F^m(g_m)| within 1e-8 (m = 2 degenerate: both "
                    "routes give F(g_0) = 0)");
        return res;
    };

    std::ostringstream prov;
    prov << "g-chain divergence in the renormed-l1 space: K = " << kmax
         << ", rho = " << rho << " (finite truncation)";
    w.provenance = prov.str();
    return w;
}

}  // namespace gawcga
