#pragma once

// Shared helpers of the analytic translation units.

#include <cmath>
#include <string>

#include "hetnet/analytic.hpp"
#include "hetnet/error.hpp"

namespace hetnet::analytic::detail {

/// Copy of `q` whose semi-infinite split sits at `length` natural units.
inline numerics::QuadratureSpec scaled(const numerics::QuadratureSpec& q, double length) {
    numerics::QuadratureSpec out = q;
    out.truncation_radius = q.truncation_radius * length;
    return out;
}

/// Tolerances for a quantity that enters an exponent: its absolute error is
/// the relative error of the result.
inline numerics::QuadratureSpec exponent_spec(const numerics::QuadratureSpec& q, double length) {
    numerics::QuadratureSpec out = scaled(q, length);
    out.rel_tol = 0.5 * q.rel_tol;
    out.abs_tol = 0.5 * q.rel_tol;
    return out;
}

/// Throw in strict mode, otherwise pass the evaluation through.
inline Evaluation finish(Evaluation e, const AnalyticOptions& opts, const char* what) {
    if (!std::isfinite(e.value)) {
        e.converged = false;
        if (e.failed_stage.empty()) e.failed_stage = "non-finite result";
    }
    if (opts.strict && !e.converged)
        throw NumericalError(std::string(what) + " did not converge (" + e.failed_stage + ")");
    return e;
}

/// Pico association probability without validation.
AssociationProbabilities association(const NetworkParams& p, const AnalyticOptions& opts);

}  // namespace hetnet::analytic::detail
