#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gawcga/element.hpp"
#include "gawcga/random.hpp"

namespace gawcga::testsupport {

// Random sparse element: up to max_support nonzeros on indices
// [min_index, max_index], coefficient magnitudes in [1e-3, 1].
inline Element random_element(Rng& rng, std::size_t max_support = 12,
                              std::size_t min_index = 0,
                              std::size_t max_index = 200) {
    Element e;
    const std::size_t k = 1 + rng.uniform_index(0, max_support - 1);
    for (std::size_t i = 0; i < k; ++i)
        e.set(rng.uniform_index(min_index, max_index), rng.signed_unit());
    if (e.is_zero()) e.set(min_index, 1.0);
    return e;
}

inline bool close_rel(double a, double b, double rel, double floor = 0.0) {
    return std::fabs(a - b) <= rel * std::max({std::fabs(a), std::fabs(b), floor});
}

}  // namespace gawcga::testsupport
