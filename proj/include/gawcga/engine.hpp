#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "gawcga/dictionary.hpp"
#include "gawcga/projection.hpp"
#include "gawcga/schedules.hpp"
#include "gawcga/space.hpp"

namespace gawcga {

inline constexpr double kAuditTol = 1e-9;

// Context handed to an atom hook at step n: everything needed to pick an
// admissible phi_n.
struct SelectionContext {
    std::size_t step = 0;  // n, 1-based
    const Functional* functional = nullptr;
    const Dictionary* dict = nullptr;
    double sup_value = 0.0;
    const SelectedAtom* argmax = nullptr;
    double t = 1.0;
    double t_prime = 0.0;
};

// Context handed to an approximant hook at step n.
struct ApproximantContext {
    std::size_t step = 0;
    const Element* f = nullptr;
    const Element* g_exact = nullptr;
    double error = 0.0;  // E_n
    double eta = 0.0;
    double eta_prime = 0.0;
    const Span* span = nullptr;
    const std::vector<std::size_t>* selected_indices = nullptr;
};

struct ProjectionContext {
    std::size_t step = 0;
    const Element* f = nullptr;
    const Span* span = nullptr;
    const std::vector<std::size_t>* selected_indices = nullptr;
    const ProjectionOptions* options = nullptr;
};

// Realizes the three existential choices of a step.  Empty hooks mean the
// exact realization: the norming functional, the sup argmax, and the solver
// approximant.  Every hook output is re-audited; an inadmissible choice
// aborts the run with ConstraintViolation.
//
// projection_rule replaces the generic best-approximation solver when a
// construction can compute E_n and the minimizer by its own (typically
// better-conditioned) route; the hook owns the optimality of the E it
// claims, and the step inequality is still audited against it.
struct RealizationPolicy {
    std::string name = "exact";
    std::function<Functional(std::size_t step, const Element& f_prev)> functional_rule;
    std::function<SelectedAtom(const SelectionContext&)> atom_rule;
    std::function<Element(const ApproximantContext&)> approximant_rule;
    std::function<Projection(const ProjectionContext&)> projection_rule;
};

struct StepRecord {
    std::size_t step = 0;
    std::size_t atom_index = 0;
    int atom_sign = +1;
    double residual_norm = 0.0;  // ||f_n||
    double best_error = 0.0;     // E_n
    double margin_functional = 0.0;
    double margin_select = 0.0;
    double margin_approx = 0.0;
    double sup_value = 0.0;
    std::size_t solver_iterations = 0;
    double wall_ms = 0.0;  // never serialized: outputs stay byte-reproducible

    // Kept state for re-audits and the lemma diagnostics.
    Functional functional;  // F_{n-1}
    Element atom;           // phi_n, signed and normalized
    Element approximant;    // G_n
    Element residual;       // f_n
};

enum class StopReason { reached_stop_tol, zero_residual, max_steps };

struct Trace {
    std::string space_desc;
    std::string dict_desc;
    std::string policy_name;
    double initial_norm = 0.0;
    std::vector<StepRecord> steps;
    StopReason stop = StopReason::max_steps;
    std::string truncation_note;

    double final_residual_norm() const {
        return steps.empty() ? initial_norm : steps.back().residual_norm;
    }
};

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::reached_stop_tol: return "reached_stop_tol";
        case StopReason::zero_residual: return "zero_residual";
        default: return "max_steps";
    }
}

// The three per-step constraints, as signed margins (admissible: >= -audit tol).
struct StepAudit {
    double margin_functional;  // min(1 - ||F||*, F(f_{n-1}) - ((1-d)||f_{n-1}|| - d'))
    double margin_select;      // F(phi_n) - (t_n sup - t'_n)
    double margin_approx;      // (1+eta_n) E_n + eta'_n - ||f - G_n||
};

struct StepAuditInputs {
    Element f_prev;      // f_{n-1}
    Functional functional;
    Element atom;        // phi_n
    double sup_value;
    Element f;           // original target
    Element approximant; // G_n
    double best_error;   // E_n
    double t, t_prime, delta, delta_prime, eta, eta_prime;
};

inline StepAudit audit_step(const Space& space, const StepAuditInputs& in) {
    StepAudit a{};
    const double fn_norm = norm(space, in.f_prev);
    const double m_norm = 1.0 - dual_norm(space, in.functional);
    const double m_value =
        apply(in.functional, in.f_prev) -
        ((1.0 - in.delta) * fn_norm - in.delta_prime);
    a.margin_functional = std::min(m_norm, m_value);
    a.margin_select =
        apply(in.functional, in.atom) - (in.t * in.sup_value - in.t_prime);
    a.margin_approx = (1.0 + in.eta) * in.best_error + in.eta_prime -
                      norm(space, in.f - in.approximant);
    return a;
}

// Recompute every step's margins from the kept state.
inline std::vector<StepAudit> audit_trace(const Space& space, const Element& f,
                                          const Schedules& sched, const Trace& trace) {
    std::vector<StepAudit> audits;
    Element f_prev = f;
    for (const auto& rec : trace.steps) {
        const std::size_t n = rec.step;
        StepAuditInputs in{f_prev,
                           rec.functional,
                           rec.atom,
                           rec.sup_value,
                           f,
                           rec.approximant,
                           rec.best_error,
                           sched.t_at(n),
                           sched.t_prime_at(n),
                           sched.delta_at(n - 1),
                           sched.delta_prime_at(n - 1),
                           sched.eta_at(n),
                           sched.eta_prime_at(n)};
        audits.push_back(audit_step(space, in));
        f_prev = rec.residual;
    }
    return audits;
}

struct EngineOptions {
    std::size_t max_steps = 100;
    double stop_tol = 0.0;
    ProjectionOptions projection;
};

// The main loop.  For each n >= 1:
//   1. F_{n-1} with ||F|| <= 1 and F(f_{n-1}) >= (1-delta_{n-1})||f_{n-1}|| - delta'_{n-1}
//   2. phi_n with F_{n-1}(phi_n) >= t_n sup_D F_{n-1} - t'_n
//   3. G_n in span{phi_1..phi_n} with ||f - G_n|| <= (1+eta_n) E_n + eta'_n
//   4. f_n = f - G_n
// Stops when ||f_n|| <= stop_tol, when the residual vanishes (the next
// norming functional would be undefined), or at max_steps.  All three
// margins are recorded per step; hook outputs failing a constraint abort
// with ConstraintViolation.
inline Trace run_gawcga(const Space& space, const Dictionary& dict, const Element& f,
                        const Schedules& sched, const RealizationPolicy& policy,
                        const EngineOptions& opts) {
    if (f.is_zero()) throw ZeroElementError("run_gawcga: f must be nonzero");
    if (opts.max_steps < 1)
        throw std::invalid_argument("run_gawcga: max_steps must be >= 1");

    Trace trace;
    trace.space_desc = describe(space);
    trace.dict_desc = dict.description();
    trace.policy_name = policy.name;
    trace.initial_norm = norm(space, f);
    trace.truncation_note =
        "finite truncation: dictionary " + dict.description() + ", at most " +
        std::to_string(opts.max_steps) + " steps";
    if (trace.initial_norm <= opts.stop_tol) {
        trace.stop = StopReason::reached_stop_tol;
        return trace;
    }

    Element f_prev = f;
    double f_prev_norm = trace.initial_norm;
    Span span;
    std::vector<double> warm;
    std::vector<std::size_t> selected_indices;

    for (std::size_t n = 1; n <= opts.max_steps; ++n) {
        const auto t0 = std::chrono::steady_clock::now();
        const double t_n = sched.t_at(n);
        const double tp_n = sched.t_prime_at(n);
        const double d_n = sched.delta_at(n - 1);
        const double dp_n = sched.delta_prime_at(n - 1);
        const double e_n = sched.eta_at(n);
        const double ep_n = sched.eta_prime_at(n);

        StepRecord rec;
        rec.step = n;

        // Step 1: functional.
        rec.functional = policy.functional_rule
                             ? policy.functional_rule(n, f_prev)
                             : norming_functional(space, f_prev);
        {
            const double m_norm = 1.0 - dual_norm(space, rec.functional);
            const double m_value = apply(rec.functional, f_prev) -
                                   ((1.0 - d_n) * f_prev_norm - dp_n);
            rec.margin_functional = std::min(m_norm, m_value);
            if (rec.margin_functional < -kAuditTol)
                throw ConstraintViolation("step " + std::to_string(n) +
                                              ": functional constraint violated",
                                          static_cast<int>(n), "functional",
                                          rec.margin_functional);
        }

        // Step 2: atom selection.
        const SupResult sup = dict.sup_functional(rec.functional);
        rec.sup_value = sup.value;
        SelectedAtom chosen;
        if (policy.atom_rule) {
            SelectionContext ctx;
            ctx.step = n;
            ctx.functional = &rec.functional;
            ctx.dict = &dict;
            ctx.sup_value = sup.value;
            ctx.argmax = &sup.argmax;
            ctx.t = t_n;
            ctx.t_prime = tp_n;
            chosen = policy.atom_rule(ctx);
        } else {
            chosen = sup.argmax;
        }
        rec.margin_select = apply(rec.functional, chosen.atom) - (t_n * sup.value - tp_n);
        if (rec.margin_select < -kAuditTol)
            throw ConstraintViolation("step " + std::to_string(n) +
                                          ": weak selection constraint violated",
                                      static_cast<int>(n), "selection",
                                      rec.margin_select);
        rec.atom = chosen.atom;
        rec.atom_index = chosen.index;
        rec.atom_sign = chosen.sign;
        span.push(chosen.atom);
        selected_indices.push_back(chosen.index);

        // Step 3: projection and approximant.
        warm.push_back(0.0);
        ProjectionOptions popts = opts.projection;
        popts.warm_start = &warm;
        Projection proj;
        if (policy.projection_rule) {
            ProjectionContext ctx;
            ctx.step = n;
            ctx.f = &f;
            ctx.span = &span;
            ctx.selected_indices = &selected_indices;
            ctx.options = &popts;
            proj = policy.projection_rule(ctx);
        } else {
            proj = best_approximation(space, f, span, popts);
        }
        rec.best_error = proj.error;
        rec.solver_iterations = proj.iterations;
        warm = proj.coefficients;

        if (policy.approximant_rule) {
            ApproximantContext ctx;
            ctx.step = n;
            ctx.f = &f;
            ctx.g_exact = &proj.approximant;
            ctx.error = proj.error;
            ctx.eta = e_n;
            ctx.eta_prime = ep_n;
            ctx.span = &span;
            ctx.selected_indices = &selected_indices;
            rec.approximant = policy.approximant_rule(ctx);
        } else {
            rec.approximant = proj.approximant;
        }
        rec.residual = f - rec.approximant;
        rec.residual_norm = norm(space, rec.residual);
        rec.margin_approx = (1.0 + e_n) * proj.error + ep_n - rec.residual_norm;
        if (rec.margin_approx < -kAuditTol)
            throw ConstraintViolation("step " + std::to_string(n) +
                                          ": approximant constraint violated",
                                      static_cast<int>(n), "approximant",
                                      rec.margin_approx);

        f_prev = rec.residual;
        f_prev_norm = rec.residual_norm;
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        trace.steps.push_back(std::move(rec));

        if (f_prev_norm < opts.projection.zero_residual_tol) {
            trace.stop = StopReason::zero_residual;
            return trace;
        }
        if (f_prev_norm <= opts.stop_tol) {
            trace.stop = StopReason::reached_stop_tol;
            return trace;
        }
    }
    trace.stop = StopReason::max_steps;
    return trace;
}

// WCGA: all slack zero, exact realization.
inline Trace run_wcga(const Space& space, const Dictionary& dict, const Element& f,
                      SequenceSpec t_spec, std::size_t max_steps, double stop_tol) {
    EngineOptions opts;
    opts.max_steps = max_steps;
    opts.stop_tol = stop_tol;
    return run_gawcga(space, dict, f, Schedules::zero_slack(std::move(t_spec)),
                      RealizationPolicy{}, opts);
}

}  // namespace gawcga
