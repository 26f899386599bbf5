#pragma once

#include <algorithm>
#include <cmath>

#include "gawcga/engine.hpp"

namespace gawcga {

// A maximally sloppy admissible realization: the functional is shrunk to its
// (1 - delta_{n-1}) - delta'_{n-1}/||f_{n-1}|| floor, the atom is the worst
// one still meeting the weak-selection bound, and the approximant is pushed
// out to the (1 + eta_n) E_n + eta'_n boundary along the last atom.  Useful
// for exercising how much the slack alone can hurt a run.
inline RealizationPolicy sloppy_policy(const Space& space, const Schedules& sched) {
    RealizationPolicy policy;
    policy.name = "sloppy";
    policy.functional_rule = [space, sched](std::size_t n, const Element& f_prev) {
        Functional exact = norming_functional(space, f_prev);
        const double fnorm = norm(space, f_prev);
        const double d = sched.delta_at(n - 1);
        const double dp = sched.delta_prime_at(n - 1);
        const double shrink =
            std::max(0.0, std::min(1.0, (1.0 - d) - dp / std::max(fnorm, 1e-300)));
        return Functional(shrink * exact.coeffs);
    };
    policy.atom_rule = [](const SelectionContext& ctx) {
        SelectedAtom worst = *ctx.argmax;
        double worst_value = apply(*ctx.functional, worst.atom);
        const double target = ctx.t * ctx.sup_value - ctx.t_prime;
        for (std::size_t ord = 0; ord < ctx.dict->base_atom_count(); ++ord) {
            for (int sign : {+1, -1}) {
                SelectedAtom cand = ctx.dict->base_atom(ord);
                cand.sign = sign;
                if (sign < 0) cand.atom = -cand.atom;
                const double v = apply(*ctx.functional, cand.atom);
                if (v >= target && v < worst_value) {
                    worst = cand;
                    worst_value = v;
                }
            }
        }
        return worst;
    };
    policy.approximant_rule = [space](const ApproximantContext& ctx) {
        const double allowance = (1.0 + ctx.eta) * ctx.error + ctx.eta_prime;
        if (allowance <= ctx.error || ctx.span->size() == 0) return *ctx.g_exact;
        const Element& dir = ctx.span->atoms.back();
        auto achieved = [&](double s) {
            Element g = *ctx.g_exact;
            g.add_scaled(dir, s);
            return norm(space, *ctx.f - g);
        };
        double lo = 0.0, hi = 1.0;
        while (achieved(hi) < allowance && hi < 1e6) hi *= 2.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (achieved(mid) < allowance ? lo : hi) = mid;
        }
        Element g = *ctx.g_exact;
        g.add_scaled(dir, lo);
        return g;
    };
    return policy;
}

}  // namespace gawcga
