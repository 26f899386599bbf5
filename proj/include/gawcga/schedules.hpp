#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "gawcga/errors.hpp"

namespace gawcga {

// One inaccuracy sequence.  Supported forms:
//   constant v
//   power decay c * n^{-a}   (n=0 evaluates as n=1 so 0-indexed sequences stay finite)
//   explicit list            (0 past the end)
//   indicator on a subsequence: base + growth*k at the k-th listed index, 0 elsewhere
struct ConstantSeq {
    double value = 0.0;
};
struct PowerDecaySeq {
    double c = 0.0;
    double a = 0.0;
};
struct ExplicitSeq {
    std::vector<double> values;  // value at n = first_index, first_index+1, ...
    std::size_t first_index = 1;
};
struct IndicatorSeq {
    std::vector<std::size_t> indices;  // strictly increasing
    double base = 0.0;
    double growth = 0.0;
};
using SequenceSpec = std::variant<ConstantSeq, PowerDecaySeq, ExplicitSeq, IndicatorSeq>;

inline double eval_sequence(const SequenceSpec& spec, std::size_t n) {
    if (auto* c = std::get_if<ConstantSeq>(&spec)) return c->value;
    if (auto* p = std::get_if<PowerDecaySeq>(&spec))
        return p->c * std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), -p->a);
    if (auto* e = std::get_if<ExplicitSeq>(&spec)) {
        if (n < e->first_index || n - e->first_index >= e->values.size()) return 0.0;
        return e->values[n - e->first_index];
    }
    auto& ind = std::get<IndicatorSeq>(spec);
    auto it = std::lower_bound(ind.indices.begin(), ind.indices.end(), n);
    if (it == ind.indices.end() || *it != n) return 0.0;
    const double k = static_cast<double>(it - ind.indices.begin()) + 1.0;
    return ind.base + ind.growth * k;
}

// The six inaccuracy sequences of a run:
//   weakness (t_n, t'_n), n >= 1, 0 <= t_n <= 1, t'_n >= 0
//   perturbation (delta_n, delta'_n), n >= 0, both >= 0
//   error (eta_n, eta'_n), n >= 1, both >= 0
struct Schedules {
    SequenceSpec t{ConstantSeq{1.0}};
    SequenceSpec t_prime{ConstantSeq{0.0}};
    SequenceSpec delta{ConstantSeq{0.0}};
    SequenceSpec delta_prime{ConstantSeq{0.0}};
    SequenceSpec eta{ConstantSeq{0.0}};
    SequenceSpec eta_prime{ConstantSeq{0.0}};

    static Schedules zero_slack(SequenceSpec t_spec = ConstantSeq{1.0}) {
        Schedules s;
        s.t = std::move(t_spec);
        return s;
    }

    double t_at(std::size_t n) const {
        const double v = eval_sequence(t, n);
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("Schedules: t_" + std::to_string(n) +
                                        " = " + std::to_string(v) + " outside [0,1]");
        return v;
    }
    double t_prime_at(std::size_t n) const { return nonneg(t_prime, n, "t'"); }
    double delta_at(std::size_t n) const { return nonneg(delta, n, "delta"); }
    double delta_prime_at(std::size_t n) const { return nonneg(delta_prime, n, "delta'"); }
    double eta_at(std::size_t n) const { return nonneg(eta, n, "eta"); }
    double eta_prime_at(std::size_t n) const { return nonneg(eta_prime, n, "eta'"); }

    // eta_0, eta'_0: least upper bounds of {eta_n}, {eta'_n} over n = 1..horizon.
    double eta_sup(std::size_t horizon) const { return sup_of(eta, horizon); }
    double eta_prime_sup(std::size_t horizon) const { return sup_of(eta_prime, horizon); }

private:
    static double nonneg(const SequenceSpec& spec, std::size_t n, const char* name) {
        const double v = eval_sequence(spec, n);
        if (v < 0.0)
            throw std::invalid_argument(std::string("Schedules: ") + name + "_" +
                                        std::to_string(n) + " negative");
        return v;
    }

    static double sup_of(const SequenceSpec& spec, std::size_t horizon) {
        double m = 0.0;
        for (std::size_t n = 1; n <= horizon; ++n)
            m = std::max(m, eval_sequence(spec, n));
        return m;
    }
};

}  // namespace gawcga
