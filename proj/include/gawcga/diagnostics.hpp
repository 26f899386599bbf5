#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "gawcga/engine.hpp"
#include "gawcga/smoothness.hpp"

namespace gawcga {

// Signed convex-combination certificate for h/A over the base atoms of a
// symmetric dictionary: h/A = sum_j w_j * atom_j with sum |w_j| <= 1.
struct HullWitness {
    std::vector<std::pair<std::size_t, double>> weights;  // (base ordinal, signed weight)
};

struct LemmaDiagnostics {
    double beta_n_gn = 0.0;       // beta_n(G_n)
    double lemma2_bound = 0.0;    // lower bound on |F_n(phi_{n+1})|
    double lemma2_actual = 0.0;
    double lemma2_margin = 0.0;   // actual - bound (>= 0 expected, up to tol)
    double lemma3_bound = 0.0;    // upper bound on E_m
    double e_m_actual = 0.0;
    double lemma3_margin = 0.0;   // bound - actual (>= 0 expected, up to tol)
    std::optional<double> theta_annotation;  // alpha^2 / (24 A C_f) when alpha given
};

// Numeric evaluation of the two per-step estimates against a recorded run:
// given h with ||f - h|| <= eps and h/A in the convex hull of the dictionary
// (certified by the caller's weights),
//   |F_n(phi_{n+1})| >= t_{n+1}/A ((1-delta_n)||f_n|| - delta'_n - beta_n(G_n) - eps) - t'_{n+1}
// and for m > n
//   E_m <= min_mu ||f_n|| [1 + delta_n + delta'_n/||f_n|| + 2 rho(mu/||f_n||)
//          - mu t_{n+1}/(A ||f_n||) ((1-delta_n)||f_n|| - delta'_n - beta_n(G_n) - eps)]
//          + mu t'_{n+1}.
// Step n may be 0 (then f_n = f and G_0 = 0); requires n < m <= steps run.
inline LemmaDiagnostics lemma2_lemma3_diagnostics(
    const Space& space, const Dictionary& dict, const Trace& trace,
    const Element& f, std::size_t n, std::size_t m, const Element& h, double A,
    double eps, const HullWitness& hull, const SmoothnessModel& model,
    const Schedules& sched,
    const std::vector<double>& mu_grid = default_lambda_grid(),
    std::optional<double> alpha_for_theta = std::nullopt) {
    if (!(A > 0.0)) throw std::invalid_argument("diagnostics: A must be > 0");
    if (eps < 0.0) throw std::invalid_argument("diagnostics: eps must be >= 0");
    if (!(n < m) || m > trace.steps.size())
        throw std::invalid_argument("diagnostics: need 0 <= n < m <= steps run");

    // ||f - h|| <= eps, verified.
    if (norm(space, f - h) > eps * (1.0 + 1e-12) + 1e-15)
        throw WitnessInvalid("diagnostics: ||f - h|| exceeds eps");

    // h/A in A1(D), verified from the supplied convex combination.
    {
        double total = 0.0;
        Element combo;
        for (const auto& [ordinal, w] : hull.weights) {
            total += std::fabs(w);
            combo.add_scaled(dict.base_atom(ordinal).atom, w);
        }
        if (total > 1.0 + 1e-12)
            throw WitnessInvalid("diagnostics: hull weights sum above 1");
        Element target = (1.0 / A) * h;
        if (norm(space, combo - target) > 1e-9 * std::max(1.0, norm(space, target)))
            throw WitnessInvalid("diagnostics: hull combination does not reproduce h/A");
    }

    LemmaDiagnostics out;
    const double fn_norm = n == 0 ? norm(space, f) : trace.steps[n - 1].residual_norm;
    const Element& g_n = n == 0 ? Element{} : trace.steps[n - 1].approximant;
    const double gn_norm = norm(space, g_n);
    const double delta_n = sched.delta_at(n);
    const double delta_p = sched.delta_prime_at(n);
    const double eta_n = n == 0 ? 0.0 : sched.eta_at(n);
    const double eta_p = n == 0 ? 0.0 : sched.eta_prime_at(n);
    const double t_next = sched.t_at(n + 1);
    const double tp_next = sched.t_prime_at(n + 1);

    out.beta_n_gn = gn_norm == 0.0
                        ? beta_bound(model, delta_n, eta_n, delta_p, eta_p, fn_norm, 0.0,
                                     {mu_grid.back()})
                        : beta_bound(model, delta_n, eta_n, delta_p, eta_p, fn_norm,
                                     gn_norm);

    const double core =
        (1.0 - delta_n) * fn_norm - delta_p - out.beta_n_gn - eps;
    out.lemma2_bound = t_next / A * core - tp_next;
    out.lemma2_actual =
        std::fabs(apply(trace.steps[n].functional, trace.steps[n].atom));
    out.lemma2_margin = out.lemma2_actual - out.lemma2_bound;

    double best = std::numeric_limits<double>::infinity();
    for (double mu : mu_grid) {
        const double value =
            fn_norm * (1.0 + delta_n + delta_p / fn_norm +
                       2.0 * model(mu / fn_norm) -
                       mu * t_next / (A * fn_norm) * core) +
            mu * tp_next;
        best = std::min(best, value);
    }
    // mu = 0 is admissible in the infimum.
    best = std::min(best, fn_norm * (1.0 + delta_n + delta_p / fn_norm));
    out.lemma3_bound = best;
    out.e_m_actual = trace.steps[m - 1].best_error;
    out.lemma3_margin = out.lemma3_bound - out.e_m_actual;

    if (alpha_for_theta) {
        const std::size_t len = trace.steps.size();
        const double c_f = (2.0 + sched.eta_sup(len)) * norm(space, f) +
                           sched.eta_prime_sup(len);
        out.theta_annotation = (*alpha_for_theta) * (*alpha_for_theta) /
                               (24.0 * A * c_f);
    }
    return out;
}

}  // namespace gawcga
