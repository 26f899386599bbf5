#pragma once

#include <stdexcept>
#include <string>

namespace gawcga {

// Domain argument errors.

struct ZeroElementError : std::invalid_argument {
    explicit ZeroElementError(const std::string& what)
        : std::invalid_argument(what) {}
};

struct ExponentOutOfRange : std::invalid_argument {
    explicit ExponentOutOfRange(const std::string& what)
        : std::invalid_argument(what) {}
};

struct HorizonExceeded : std::out_of_range {
    explicit HorizonExceeded(const std::string& what)
        : std::out_of_range(what) {}
};

struct HypothesisViolated : std::invalid_argument {
    explicit HypothesisViolated(const std::string& what)
        : std::invalid_argument(what) {}
};

// Numerical / run-time failures.

// Iterative projection failed to certify within the budget.  Carries the
// state actually reached so callers can report it.
struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& what, double achieved_residual_norm,
                   double achieved_certificate)
        : std::runtime_error(what),
          residual_norm(achieved_residual_norm),
          certificate(achieved_certificate) {}
    double residual_norm;
    double certificate;
};

struct NoRoot : std::runtime_error {
    explicit NoRoot(const std::string& what) : std::runtime_error(what) {}
};

// A realization hook emitted a choice that fails its step constraint.
struct ConstraintViolation : std::runtime_error {
    ConstraintViolation(const std::string& what, int at_step,
                        const std::string& which_constraint, double step_margin)
        : std::runtime_error(what),
          step(at_step),
          constraint(which_constraint),
          margin(step_margin) {}
    int step;
    std::string constraint;
    double margin;
};

// A requested approximant breaks the step-3 inequality.
struct SlackViolated : std::runtime_error {
    SlackViolated(const std::string& what, double step_margin)
        : std::runtime_error(what), margin(step_margin) {}
    double margin;
};

// A witness constructor could not satisfy one of its defining inequalities.
struct ConstructionInvalid : std::runtime_error {
    explicit ConstructionInvalid(const std::string& what)
        : std::runtime_error(what) {}
};

// A convex-combination certificate supplied to the diagnostics is wrong.
struct WitnessInvalid : std::runtime_error {
    explicit WitnessInvalid(const std::string& what)
        : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gawcga
