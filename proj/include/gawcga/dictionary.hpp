#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "gawcga/space.hpp"

namespace gawcga {

// A selected atom: the normalized element with its sign applied, plus the
// identity used in traces.
struct SelectedAtom {
    Element atom;
    std::size_t index = 0;  // canonical: coordinate index; g-dictionary: k; explicit: ordinal
    int sign = +1;
};

struct SupResult {
    double value = 0.0;  // sup_{g in D} F(g) = max over base atoms of |F(g)|
    SelectedAtom argmax;
};

// Finite truncation of a normalized symmetric dictionary.  Every atom has
// unit norm in its space; for each g the sign-flipped -g is also available.
// The truncation index is part of the run record.
class Dictionary {
public:
    // {±e_j : i0 <= j <= n}.
    static Dictionary canonical(const Space& space, std::size_t i0, std::size_t n) {
        if (i0 > 1)
            throw std::invalid_argument("canonical dictionary: i0 must be 0 or 1");
        if (n < i0)
            throw std::invalid_argument("canonical dictionary: need n >= i0");
        if (auto* x = std::get_if<SmoothSpaceX>(&space)) {
            if (i0 < 1 || n > x->horizon())
                throw HorizonExceeded(
                    "canonical dictionary over X: indices must lie in {1..horizon}");
        }
        Dictionary d;
        d.kind_ = Canonical{i0, n};
        d.description_ = "canonical[" + std::to_string(i0) + ".." + std::to_string(n) + "]";
        return d;
    }

    // {±g_k/||g_k||_X : 0 <= k <= K} with g_0 = e_1+e_2+e_3, g_k = e_k+e_{k+1}.
    static Dictionary g_dictionary(const SmoothSpaceX& x, std::size_t kmax) {
        if (kmax + 1 > x.horizon() || x.horizon() < 3)
            throw HorizonExceeded("g_dictionary: needs K+1 <= horizon and horizon >= 3");
        GDict g;
        for (std::size_t k = 0; k <= kmax; ++k) {
            Element gk;
            if (k == 0) {
                gk.set(1, 1.0);
                gk.set(2, 1.0);
                gk.set(3, 1.0);
            } else {
                gk.set(k, 1.0);
                gk.set(k + 1, 1.0);
            }
            g.base.push_back(gk);
            g.norms.push_back(x.x_norm(gk));
        }
        Dictionary d;
        d.kind_ = std::move(g);
        d.description_ = "g-dictionary[0.." + std::to_string(kmax) + "]";
        return d;
    }

    // Arbitrary finite list; atoms are normalized here.
    static Dictionary explicit_list(const Space& space, std::vector<Element> atoms) {
        ExplicitDict e;
        for (auto& a : atoms) {
            const double n = norm(space, a);
            if (n == 0.0)
                throw ZeroElementError("explicit dictionary: zero atom");
            e.atoms.push_back((1.0 / n) * a);
        }
        Dictionary d;
        d.kind_ = std::move(e);
        d.description_ = "explicit[" + std::to_string(e.atoms.size()) + "]";
        return d;
    }

    std::size_t base_atom_count() const {
        if (auto* c = std::get_if<Canonical>(&kind_)) return c->n - c->i0 + 1;
        if (auto* g = std::get_if<GDict>(&kind_)) return g->base.size();
        return std::get<ExplicitDict>(kind_).atoms.size();
    }

    // ordinal in [0, base_atom_count): the +1-signed normalized atom.
    SelectedAtom base_atom(std::size_t ordinal) const {
        if (auto* c = std::get_if<Canonical>(&kind_))
            return {Element::basis(c->i0 + ordinal), c->i0 + ordinal, +1};
        if (auto* g = std::get_if<GDict>(&kind_))
            return {(1.0 / g->norms[ordinal]) * g->base[ordinal], ordinal, +1};
        return {std::get<ExplicitDict>(kind_).atoms[ordinal], ordinal, +1};
    }

    // max over atoms (both signs) of F(g); ties broken by lowest atom index,
    // positive sign first.  Always >= 0 because the dictionary is symmetric.
    SupResult sup_functional(const Functional& f) const {
        if (auto* c = std::get_if<Canonical>(&kind_)) {
            // Only indices in F's support can give a nonzero value.
            double best = 0.0;
            std::size_t best_idx = c->i0;
            int best_sign = +1;
            for (auto& [idx, v] : f.coeffs.coords()) {
                if (idx < c->i0 || idx > c->n) continue;
                const double mag = std::fabs(v);
                if (mag > best) {
                    best = mag;
                    best_idx = idx;
                    best_sign = v > 0 ? +1 : -1;
                }
            }
            Element atom = Element::basis(best_idx, best_sign > 0 ? 1.0 : -1.0);
            return {best, {std::move(atom), best_idx, best_sign}};
        }
        double best = -1.0;
        std::size_t best_ord = 0;
        int best_sign = +1;
        const std::size_t count = base_atom_count();
        for (std::size_t ord = 0; ord < count; ++ord) {
            const double v = value_of(ord, f);
            const double mag = std::fabs(v);
            if (mag > best) {
                best = mag;
                best_ord = ord;
                best_sign = v >= 0 ? +1 : -1;
            }
        }
        SelectedAtom sel = base_atom(best_ord);
        sel.sign = best_sign;
        if (best_sign < 0) sel.atom = -sel.atom;
        return {std::max(best, 0.0), std::move(sel)};
    }

    const std::string& description() const { return description_; }
    bool is_canonical() const { return std::holds_alternative<Canonical>(kind_); }

private:
    struct Canonical {
        std::size_t i0, n;
    };
    struct GDict {
        std::vector<Element> base;
        std::vector<double> norms;
    };
    struct ExplicitDict {
        std::vector<Element> atoms;
    };

    double value_of(std::size_t ordinal, const Functional& f) const {
        if (auto* g = std::get_if<GDict>(&kind_))
            return apply(f, g->base[ordinal]) / g->norms[ordinal];
        return apply(f, std::get<ExplicitDict>(kind_).atoms[ordinal]);
    }

    std::variant<Canonical, GDict, ExplicitDict> kind_;
    std::string description_;
};

// Step-2 selection: take `preference` when it meets
//   F(phi) >= t sup_{g in D} F(g) - t',
// otherwise the sup argmax (which always does, since sup >= 0).
// The equality case is accepted with a small grace so that realizations
// designed to sit exactly on the constraint are not derailed by round-off;
// the engine re-audits every selection at the 1e-9 audit tolerance.
inline constexpr double kWeakSelectGrace = 1e-12;

inline SelectedAtom weak_select(const Dictionary& dict, const Functional& f,
                                double t, double t_prime,
                                const SelectedAtom* preference = nullptr) {
    if (t < 0.0 || t > 1.0 || t_prime < 0.0)
        throw std::invalid_argument("weak_select: need 0 <= t <= 1 and t' >= 0");
    SupResult sup = dict.sup_functional(f);
    const double target = t * sup.value - t_prime;
    if (preference && apply(f, preference->atom) >= target - kWeakSelectGrace)
        return *preference;
    return sup.argmax;
}

}  // namespace gawcga
