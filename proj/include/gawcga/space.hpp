#pragma once

#include <string>
#include <variant>

#include "gawcga/lq_space.hpp"
#include "gawcga/smooth_space.hpp"

namespace gawcga {

// A run executes in either an l_q space or the recursively normed space X.
// Everything downstream needs only the norm, the norming functional, and the
// dual norm of a functional.
using Space = std::variant<LqSpace, SmoothSpaceX>;

inline double norm(const Space& space, const Element& x) {
    return std::visit(
        [&](const auto& s) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, LqSpace>)
                return lq_norm(s, x);
            else
                return s.x_norm(x);
        },
        space);
}

inline Functional norming_functional(const Space& space, const Element& x) {
    return std::visit(
        [&](const auto& s) -> Functional {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, LqSpace>)
                return lq_norming_functional(s, x);
            else
                return s.norming_functional(x);
        },
        space);
}

inline double dual_norm(const Space& space, const Functional& f) {
    return std::visit(
        [&](const auto& s) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, LqSpace>)
                return lq_dual_norm(s, f);
            else
                return s.dual_norm(f);
        },
        space);
}

inline std::string describe(const Space& space) {
    return std::visit(
        [&](const auto& s) -> std::string {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, LqSpace>)
                return "lq(q=" + std::to_string(s.q) + ")";
            else
                return "smooth-x(horizon=" + std::to_string(s.horizon()) + ")";
        },
        space);
}

}  // namespace gawcga
