#include <cmath>

#include "detail.hpp"
#include "hetnet/analytic.hpp"

namespace hetnet::analytic {

std::string_view to_string(DensityForm form) { return form == DensityForm::Exact ? "exact" : "mixed-partial"; }

void Evaluation::absorb(const numerics::IntegralResult& r, const char* stage) {
    error_estimate += r.error_estimate;
    if (!r.converged) {
        converged = false;
        if (failed_stage.empty()) failed_stage = stage;
    }
}

void Evaluation::absorb(const Evaluation& e) {
    error_estimate += e.error_estimate;
    if (!e.converged) {
        converged = false;
        if (failed_stage.empty()) failed_stage = e.failed_stage;
    }
}

namespace detail {

AssociationProbabilities association(const NetworkParams& p, const AnalyticOptions& opts) {
    AssociationProbabilities out;
    if (p.lambda_s == 0.0) return out;
    const double a = p.lambda_m * std::pow(delta_m(p), -2.0);
    const double e = p.alpha_s / p.alpha_m;
    auto f = [&](double x) {
        return 2.0 * kPi * p.lambda_s * x * std::exp(-kPi * (a * std::pow(x, 2.0 * e) + p.lambda_s * x * x));
    };
    const auto r = numerics::integrate_1d(f, 0.0, numerics::kInf, scaled(opts.quad, 1.0 / std::sqrt(kPi * p.lambda_s)));
    out.p_s = r.value;
    out.p_m = 1.0 - r.value;
    out.error_estimate = r.error_estimate;
    out.converged = r.converged;
    return out;
}

}  // namespace detail

AssociationProbabilities association_probability(const NetworkParams& p, const AnalyticOptions& opts) {
    p.validate();
    opts.quad.validate();
    const AssociationProbabilities a = detail::association(p, opts);
    if (opts.strict && !a.converged) throw NumericalError("association probability did not converge");
    return a;
}

}  // namespace hetnet::analytic
