#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <utility>

#include "gawcga/errors.hpp"

namespace gawcga {

// Finitely supported real coefficient vector over non-negative integer
// indices.  Explicit zeros are pruned on insertion, so equality and support
// queries never see them.  Immutable in spirit: every operation returns a
// new value.
class Element {
public:
    using Coords = std::map<std::size_t, double>;

    Element() = default;

    explicit Element(Coords coords) {
        for (auto& [idx, v] : coords) set(idx, v);
    }

    // Dense-style construction: values placed at first_index, first_index+1, ...
    static Element dense(std::initializer_list<double> values,
                         std::size_t first_index = 1) {
        Element e;
        std::size_t idx = first_index;
        for (double v : values) e.set(idx++, v);
        return e;
    }

    static Element basis(std::size_t index, double value = 1.0) {
        Element e;
        e.set(index, value);
        return e;
    }

    void set(std::size_t index, double value) {
        if (!std::isfinite(value))
            throw std::invalid_argument("Element: non-finite coefficient");
        if (value == 0.0)
            coords_.erase(index);
        else
            coords_[index] = value;
    }

    double operator[](std::size_t index) const {
        auto it = coords_.find(index);
        return it == coords_.end() ? 0.0 : it->second;
    }

    const Coords& coords() const { return coords_; }
    bool is_zero() const { return coords_.empty(); }
    std::size_t support_size() const { return coords_.size(); }

    // Max index with nonzero coefficient; 0 for the zero element.
    std::size_t max_index() const {
        return coords_.empty() ? 0 : coords_.rbegin()->first;
    }
    std::size_t min_index() const {
        return coords_.empty() ? 0 : coords_.begin()->first;
    }

    double l1_norm() const {
        double s = 0.0;
        for (auto& [idx, v] : coords_) s += std::fabs(v);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (auto& [idx, v] : coords_) m = std::max(m, std::fabs(v));
        return m;
    }

    Element& add_scaled(const Element& other, double scale) {
        for (auto& [idx, v] : other.coords_) set(idx, (*this)[idx] + scale * v);
        return *this;
    }

    friend Element operator+(Element a, const Element& b) {
        return a.add_scaled(b, 1.0);
    }
    friend Element operator-(Element a, const Element& b) {
        return a.add_scaled(b, -1.0);
    }
    friend Element operator*(double s, const Element& e) {
        Element r;
        for (auto& [idx, v] : e.coords_) r.set(idx, s * v);
        return r;
    }
    friend Element operator-(const Element& e) { return -1.0 * e; }

    friend bool operator==(const Element& a, const Element& b) {
        return a.coords_ == b.coords_;
    }

private:
    Coords coords_;
};

// Bounded linear functional given by its coefficient sequence; application
// is the finite coordinate pairing.  declared_dual_norm records what the
// creator claims (norming constructors declare 1); audits recompute the
// actual dual norm rather than trusting it.
struct Functional {
    Element coeffs;
    std::optional<double> declared_dual_norm;

    Functional() = default;
    explicit Functional(Element c, std::optional<double> declared = std::nullopt)
        : coeffs(std::move(c)), declared_dual_norm(declared) {
        if (declared_dual_norm && *declared_dual_norm < 0.0)
            throw std::invalid_argument("Functional: negative declared dual norm");
    }

    double operator()(const Element& y) const { return apply(*this, y); }

    // Σ_j F_j y_j over the union of supports (iterates the smaller map).
    friend double apply(const Functional& f, const Element& y) {
        const auto& a = f.coeffs.coords();
        const auto& b = y.coords();
        const auto& small = a.size() <= b.size() ? a : b;
        const auto& large = a.size() <= b.size() ? b : a;
        double s = 0.0;
        for (auto& [idx, v] : small) {
            auto it = large.find(idx);
            if (it != large.end()) s += v * it->second;
        }
        return s;
    }
};

}  // namespace gawcga
