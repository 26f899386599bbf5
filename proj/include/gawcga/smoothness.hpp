#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gawcga/random.hpp"
#include "gawcga/space.hpp"

namespace gawcga {

// Upper bound for the modulus of smoothness of l_q / L_q:
//   u^q / q           for 1 < q <= 2,
//   (q-1) u^2 / 2     for q >= 2.
inline double modulus_lp_bound(double q, double u) {
    if (!(q > 1.0))
        throw ExponentOutOfRange("modulus_lp_bound: requires q > 1");
    if (u < 0.0) throw std::invalid_argument("modulus_lp_bound: u must be >= 0");
    if (q <= 2.0) return std::pow(u, q) / q;
    return 0.5 * (q - 1.0) * u * u;
}

// Monte-Carlo lower estimate of rho(u) = sup (||x+uy|| + ||x-uy||)/2 - 1
// over unit pairs: the max over `samples` random pairs supported on the
// first few coordinates.  Always a lower estimate of the true modulus.
inline double modulus_empirical(const Space& space, double u, std::size_t samples,
                                std::uint64_t seed, std::size_t support_dim = 8) {
    if (u < 0.0) throw std::invalid_argument("modulus_empirical: u must be >= 0");
    if (samples < 1) throw std::invalid_argument("modulus_empirical: samples >= 1");
    if (u == 0.0) return 0.0;
    std::size_t dim = support_dim;
    if (auto* x = std::get_if<SmoothSpaceX>(&space))
        dim = std::min(dim, x->horizon());
    Rng rng(seed);
    auto random_unit = [&]() {
        Element e;
        for (std::size_t k = 1; k <= dim; ++k) e.set(k, rng.uniform(-1.0, 1.0));
        const double n = norm(space, e);
        return (1.0 / n) * e;
    };
    double best = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Element x = random_unit();
        const Element y = random_unit();
        const double v =
            0.5 * (norm(space, x + u * y) + norm(space, x - u * y)) - 1.0;
        best = std::max(best, v);
    }
    return best;
}

// A modulus-of-smoothness evaluator plus its power-type parameters when they
// are known in closed form.
struct SmoothnessModel {
    std::string kind;
    std::function<double(double)> rho;
    std::optional<double> gamma;       // rho(u) <= gamma u^power
    std::optional<double> power;

    double operator()(double u) const { return rho(u); }

    static SmoothnessModel lp_upper_bound(double q) {
        if (!(q > 1.0))
            throw ExponentOutOfRange("SmoothnessModel::lp_upper_bound: q > 1");
        SmoothnessModel m;
        m.kind = "lp-bound(q=" + std::to_string(q) + ")";
        m.rho = [q](double u) { return modulus_lp_bound(q, u); };
        if (q <= 2.0) {
            m.gamma = 1.0 / q;
            m.power = q;
        } else {
            m.gamma = 0.5 * (q - 1.0);
            m.power = 2.0;
        }
        return m;
    }

    // Exact Hilbert modulus sqrt(1 + u^2) - 1.
    static SmoothnessModel l2_exact() {
        SmoothnessModel m;
        m.kind = "l2-exact";
        m.rho = [](double u) { return std::sqrt(1.0 + u * u) - 1.0; };
        m.gamma = 0.5;
        m.power = 2.0;
        return m;
    }

    static SmoothnessModel power_type(double gamma, double q) {
        if (!(gamma > 0.0) || !(q > 1.0))
            throw ExponentOutOfRange("SmoothnessModel::power_type: gamma > 0, q > 1");
        SmoothnessModel m;
        m.kind = "power(gamma=" + std::to_string(gamma) + ",q=" + std::to_string(q) + ")";
        m.rho = [gamma, q](double u) { return gamma * std::pow(u, q); };
        m.gamma = gamma;
        m.power = q;
        return m;
    }

    // Sampled lower estimate; labeled as such.  Each evaluation reuses the
    // same seed so the model is a fixed deterministic function.
    static SmoothnessModel empirical(Space space, std::size_t samples,
                                     std::uint64_t seed) {
        SmoothnessModel m;
        m.kind = "empirical(" + describe(space) + ")";
        auto sp = std::make_shared<Space>(std::move(space));
        m.rho = [sp, samples, seed](double u) {
            return modulus_empirical(*sp, u, samples, seed);
        };
        return m;
    }
};

// Positive root of rho(xi) = theta t xi, by bracketing bisection: the lower
// bracket halves from 1 until rho(u) < theta t u (uniform smoothness drives
// rho(u)/u -> 0), the upper doubles until rho(u) > theta t u.  A missing
// bracket signals a modulus that is not of the required shape (not uniformly
// smooth, or theta t too large for the model's domain).
inline double xi_solve(const SmoothnessModel& model, double theta, double t) {
    if (!(theta > 0.0) || theta > 0.5)
        throw std::invalid_argument("xi_solve: requires 0 < theta <= 1/2");
    if (!(t > 0.0) || t > 1.0)
        throw std::invalid_argument("xi_solve: requires 0 < t <= 1");
    const double slope = theta * t;

    double lo = 1.0;
    int guard = 0;
    while (model(lo) >= slope * lo) {
        lo *= 0.5;
        if (++guard > 4000)
            throw NoRoot("xi_solve: no lower bracket; rho(u)/u does not fall below "
                         "theta*t (modulus not uniformly smooth?)");
    }
    double hi = std::max(2.0 * lo, 1.0);
    while (model(hi) <= slope * hi) {
        hi *= 2.0;
        if (hi > 1e9)
            throw NoRoot("xi_solve: no upper bracket below 1e9 (theta*t too large "
                         "for the model's domain?)");
    }
    // Bisect until both the defining residual and the bracket itself are
    // tight, so the root is pinned well inside the stated 1e-10 tolerance.
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 500; ++it) {
        mid = 0.5 * (lo + hi);
        const double g = model(mid) - slope * mid;
        if (std::fabs(g) <= 1e-13 * std::max(1.0, mid) ||
            hi - lo <= 1e-13 * std::max(1.0, mid))
            return mid;
        (g < 0.0 ? lo : hi) = mid;
    }
    return mid;
}

inline std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
    std::vector<double> g(points);
    const double r = std::pow(hi / lo, 1.0 / static_cast<double>(points - 1));
    double v = lo;
    for (std::size_t i = 0; i < points; ++i, v *= r) g[i] = v;
    return g;
}

inline std::vector<double> default_lambda_grid() {
    return geometric_grid(1e-6, 1e3, 200);
}

// Upper estimate of
//   beta_n(phi) = inf_{lambda>0} (1/lambda) (delta_n + eta_n
//                 + (delta'_n + eta'_n)/||f_n|| + 2 rho(lambda ||phi||)),
// taken as the min over a geometric lambda grid.
inline double beta_bound(const SmoothnessModel& model, double delta, double eta,
                         double delta_prime, double eta_prime, double norm_fn,
                         double norm_phi,
                         const std::vector<double>& lambda_grid = default_lambda_grid()) {
    if (!(norm_fn > 0.0))
        throw std::invalid_argument("beta_bound: requires ||f_n|| > 0");
    const double errs = delta + eta + (delta_prime + eta_prime) / norm_fn;
    double best = std::numeric_limits<double>::infinity();
    for (double lambda : lambda_grid)
        best = std::min(best, (errs + 2.0 * model(lambda * norm_phi)) / lambda);
    return best;
}

}  // namespace gawcga
