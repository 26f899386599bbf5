#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "gawcga/element.hpp"
#include "gawcga/errors.hpp"

namespace gawcga {

// Specification of the exponent sequence {p_k}.  The geometric form
// p_k = 1 + c r^{k-1} is the default (c=1, r=1/2 gives p_k = 1 + 2^{1-k});
// its tail of sum(1 - 1/p_k) is bounded by c r^K / (1-r).  An explicit list
// is treated as truncated: exponents past the list contribute nothing.
// A constant p > 1 makes sum(1 - 1/p_k) diverge and is rejected.
struct GeometricPSeq {
    double c = 1.0;
    double r = 0.5;
};
struct ExplicitPSeq {
    std::vector<double> p;  // p_1, p_2, ...
};
struct ConstantPSeq {
    double p;
};
using PSeqSpec = std::variant<GeometricPSeq, ExplicitPSeq, ConstantPSeq>;

// l_p accumulation of two non-negative terms, scaled against the larger one
// so the intermediate powers stay in range.
inline double lp_pair(double a, double b, double p) {
    const double m = std::max(a, b);
    if (m == 0.0) return 0.0;
    return m * std::pow(std::pow(a / m, p) + std::pow(b / m, p), 1.0 / p);
}

// The renormed-l1 space of recursively nested l_{p_n} sums:
//   theta_0(x) = 0,  theta_n(x) = (theta_{n-1}^{p_n}(x) + |x_n|^{p_n})^{1/p_n},
//   ||x||_X = lim theta_n(x),
// with dual norms nu_n built the same way from q_n = p_n/(p_n - 1).
// Coordinates live in {1..horizon}; the exponent tables are fixed at
// construction so runs are reproducible.
class SmoothSpaceX {
public:
    SmoothSpaceX(const PSeqSpec& spec, std::size_t horizon)
        : horizon_(horizon) {
        if (horizon_ < 1)
            throw ConstructionInvalid("SmoothSpaceX: horizon must be >= 1");
        if (std::holds_alternative<ConstantPSeq>(spec)) {
            throw ConstructionInvalid(
                "SmoothSpaceX: constant exponent sequence makes sum(1-1/p_k) "
                "diverge; the norm would not be equivalent to l1");
        }
        p_.resize(horizon_ + 1, 0.0);
        q_.resize(horizon_ + 1, 0.0);
        for (std::size_t k = 1; k <= horizon_; ++k) {
            p_[k] = eval_p(spec, k);
            if (!(p_[k] > 1.0))
                throw ExponentOutOfRange("SmoothSpaceX: p_" + std::to_string(k) +
                                         " must be > 1");
            if (k > 1 && p_[k] > p_[k - 1] + 1e-15)
                throw ConstructionInvalid(
                    "SmoothSpaceX: exponent sequence must be non-increasing");
            q_[k] = p_[k] / (p_[k] - 1.0);
        }
        certify_rho(spec);
    }

    static SmoothSpaceX with_default_pseq(std::size_t horizon) {
        return SmoothSpaceX(GeometricPSeq{}, horizon);
    }

    std::size_t horizon() const { return horizon_; }
    double p(std::size_t k) const { return p_[k]; }
    double q(std::size_t k) const { return q_[k]; }

    // rho = 2^{-sum(1 - 1/p_k)}: the constant of rho ||x||_1 <= ||x||_X.
    double equivalence_constant() const { return rho_; }
    double rho_exponent_partial_sum() const { return rho_partial_; }
    double rho_exponent_tail_bound() const { return rho_tail_; }
    std::size_t rho_terms_used() const { return rho_terms_; }

    double theta_norm(const Element& x, std::size_t n) const {
        if (n > horizon_)
            throw HorizonExceeded("theta_norm: n=" + std::to_string(n) +
                                  " exceeds horizon " + std::to_string(horizon_));
        check_support(x);
        // The recursion is constant past the support, so stop there.
        const std::size_t stop = std::min(n, x.max_index());
        double th = 0.0;
        for (std::size_t k = 1; k <= stop; ++k)
            th = lp_pair(th, std::fabs(x[k]), p_[k]);
        return th;
    }

    double x_norm(const Element& x) const {
        if (x.is_zero()) return 0.0;
        return theta_norm(x, x.max_index());
    }

    double nu_dual_norm(const Element& a, std::size_t n) const {
        if (n > horizon_)
            throw HorizonExceeded("nu_dual_norm: n exceeds horizon");
        check_support(a);
        const std::size_t stop = std::min(n, a.max_index());
        double nu = 0.0;
        for (std::size_t k = 1; k <= stop; ++k)
            nu = lp_pair(nu, std::fabs(a[k]), q_[k]);
        return nu;
    }

    double dual_norm(const Functional& f) const {
        if (f.coeffs.is_zero()) return 0.0;
        return nu_dual_norm(f.coeffs, f.coeffs.max_index());
    }

    // Norming functional of a finitely supported nonzero x, built by the
    // recursion
    //   F^n(y) = (theta_{n-1}^{p_n-1}(x) F^{n-1}(y)
    //             + sgn(x_n) |x_n|^{p_n-1} y_n) / theta_n^{p_n-1}(x).
    // Contract: F(x) = ||x||_X and nu_m(coefficients) = 1.  A zero prefix
    // contributes nothing (0/0 := 0 there).
    Functional norming_functional(const Element& x) const {
        if (x.is_zero())
            throw ZeroElementError("SmoothSpaceX::norming_functional: zero element");
        check_support(x);
        const std::size_t m = x.max_index();
        std::vector<std::pair<std::size_t, double>> coeffs;
        double th_prev = 0.0;
        for (std::size_t k = 1; k <= m; ++k) {
            const double xk = std::fabs(x[k]);
            const double th = lp_pair(th_prev, xk, p_[k]);
            if (th == 0.0) continue;  // whole prefix still zero
            const double shrink =
                th_prev == 0.0 ? 0.0 : std::pow(th_prev / th, p_[k] - 1.0);
            for (auto& [idx, c] : coeffs) c *= shrink;
            if (xk != 0.0) {
                const double mag = std::pow(xk / th, p_[k] - 1.0);
                coeffs.emplace_back(k, x[k] > 0 ? mag : -mag);
            }
            th_prev = th;
        }
        Element e;
        for (auto& [idx, c] : coeffs) e.set(idx, c);
        return Functional(std::move(e), 1.0);
    }

private:
    static double eval_p(const PSeqSpec& spec, std::size_t k) {
        if (auto* g = std::get_if<GeometricPSeq>(&spec))
            return 1.0 + g->c * std::pow(g->r, static_cast<double>(k - 1));
        auto& list = std::get<ExplicitPSeq>(spec).p;
        if (k > list.size())
            throw ConstructionInvalid(
                "SmoothSpaceX: explicit exponent list shorter than horizon");
        return list[k - 1];
    }

    void certify_rho(const PSeqSpec& spec) {
        double s = 0.0;
        if (auto* g = std::get_if<GeometricPSeq>(&spec)) {
            if (!(g->c > 0.0) || !(g->r > 0.0) || !(g->r < 1.0))
                throw ConstructionInvalid(
                    "SmoothSpaceX: geometric exponent spec needs c > 0, 0 < r < 1");
            std::size_t k = 1;
            double tail = g->c / (1.0 - g->r);  // bound after zero terms
            while (tail > 1e-6 * (s + tail) && k < 100000) {
                const double pk = 1.0 + g->c * std::pow(g->r, static_cast<double>(k - 1));
                s += 1.0 - 1.0 / pk;
                tail = g->c * std::pow(g->r, static_cast<double>(k)) / (1.0 - g->r);
                ++k;
            }
            rho_terms_ = k - 1;
            rho_tail_ = tail;
        } else {
            auto& list = std::get<ExplicitPSeq>(spec).p;
            for (double pk : list) s += 1.0 - 1.0 / pk;
            rho_terms_ = list.size();
            rho_tail_ = 0.0;  // truncated sequence: past-the-list exponents treated as 1-adjacent
        }
        rho_partial_ = s;
        rho_ = std::pow(2.0, -(rho_partial_ + rho_tail_));
    }

    void check_support(const Element& x) const {
        if (x.is_zero()) return;
        if (x.min_index() < 1 || x.max_index() > horizon_)
            throw HorizonExceeded(
                "SmoothSpaceX: support must lie in {1.." + std::to_string(horizon_) +
                "}, got [" + std::to_string(x.min_index()) + ".." +
                std::to_string(x.max_index()) + "]");
    }

    std::size_t horizon_;
    std::vector<double> p_, q_;
    double rho_ = 0.0;
    double rho_partial_ = 0.0;
    double rho_tail_ = 0.0;
    std::size_t rho_terms_ = 0;
};

}  // namespace gawcga
