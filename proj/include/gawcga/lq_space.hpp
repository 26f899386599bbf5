#pragma once

#include <cmath>
#include <string>

#include "gawcga/element.hpp"
#include "gawcga/errors.hpp"

namespace gawcga {

// Conjugate exponent p = q/(q-1).
inline double dual_exponent(double q) {
    if (!(q > 1.0))
        throw ExponentOutOfRange("dual_exponent: requires q > 1, got q=" +
                                 std::to_string(q));
    return q / (q - 1.0);
}

// The sequence space l_q, 1 < q < oo.
struct LqSpace {
    double q;
    double p;  // dual exponent

    explicit LqSpace(double exponent) : q(exponent), p(dual_exponent(exponent)) {}
};

// (sum |x_j|^q)^{1/q}, accumulated against the largest magnitude so extreme
// coefficient scales cannot overflow the intermediate powers.
inline double lq_norm(const LqSpace& space, const Element& x) {
    const double m = x.max_abs();
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (auto& [idx, v] : x.coords()) s += std::pow(std::fabs(v) / m, space.q);
    return m * std::pow(s, 1.0 / space.q);
}

// Norming functional of a nonzero x in l_q: coefficients
// sgn(x_j) |x_j|^{q-1} / ||x||^{q-1}, so F(x) = ||x||_q and ||F||_p = 1.
inline Functional lq_norming_functional(const LqSpace& space, const Element& x) {
    if (x.is_zero())
        throw ZeroElementError("lq_norming_functional: zero element has no norming functional");
    const double m = x.max_abs();
    double s = 0.0;
    for (auto& [idx, v] : x.coords()) s += std::pow(std::fabs(v) / m, space.q);
    // a_j = sgn(x_j) (|x_j|/m)^{q-1} / s^{(q-1)/q}; the m powers cancel.
    const double denom = std::pow(s, (space.q - 1.0) / space.q);
    Element coeffs;
    for (auto& [idx, v] : x.coords()) {
        const double mag = std::pow(std::fabs(v) / m, space.q - 1.0) / denom;
        coeffs.set(idx, v > 0 ? mag : -mag);
    }
    return Functional(std::move(coeffs), 1.0);
}

// Dual norm ||a||_p of a functional over l_q.
inline double lq_dual_norm(const LqSpace& space, const Functional& f) {
    return lq_norm(LqSpace(space.p), f.coeffs);
}

}  // namespace gawcga
