#include <algorithm>
#include <cmath>

#include "detail.hpp"
#include "hetnet/analytic.hpp"

namespace hetnet::analytic {

std::string_view to_string(TopologyCase c) {
    switch (c) {
        case TopologyCase::A: return "A";
        case TopologyCase::B: return "B";
        case TopologyCase::C: return "C";
        case TopologyCase::Forbidden: return "forbidden";
    }
    return "?";
}

JointPdfCase classify(double r_s, double r, const NetworkParams& p) {
    const double R0 = inner_macro_radius(p, r_s);
    JointPdfCase out;
    out.lower = std::abs(r_s - R0);
    out.upper = r_s + R0;
    out.delta_m_at_least_one = delta_m(p) >= 1.0;
    if (r < R0 - r_s)
        out.kind = TopologyCase::Forbidden;
    else if (r <= r_s - R0)
        out.kind = TopologyCase::A;
    else if (r >= r_s + R0)
        out.kind = TopologyCase::C;
    else
        out.kind = TopologyCase::B;
    return out;
}

namespace {

/// Pr(no pico within r_s, no macro within R0(r_s) of the user or within r of
/// the pico), the joint void probability whose mixed partial is the density.
double void_probability(double r_s, double r, const NetworkParams& p) {
    const double R0 = inner_macro_radius(p, r_s);
    const double area = kPi * R0 * R0 + kPi * r * r - lens_area(r_s, R0, r);
    return std::exp(-p.lambda_s * kPi * r_s * r_s - p.lambda_m * area);
}

double mixed_partial(double r_s, double r, const NetworkParams& p) {
    auto central = [&](double h) {
        return (void_probability(r_s + h, r + h, p) - void_probability(r_s + h, r - h, p) -
                void_probability(r_s - h, r + h, p) + void_probability(r_s - h, r - h, p)) /
               (4.0 * h * h);
    };
    const double h = std::min(1e-4 * std::max(r_s, r), 0.5 * std::min(r_s, r));
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

double literal_pdf(double r_s, double r, const NetworkParams& p, TopologyCase kind) {
    const double R0 = inner_macro_radius(p, r_s);
    const double lm = p.lambda_m;
    const double ls = p.lambda_s;
    switch (kind) {
        case TopologyCase::A:
            return 4.0 * kPi * kPi * r * lm * (R0 * R0 * p.alpha_s * lm + r_s * r_s * p.alpha_m * ls) /
                   (r_s * p.alpha_m) * std::exp(-kPi * (r * r * lm + R0 * R0 * lm + r_s * r_s * ls));
        case TopologyCase::C:
            return 4.0 * kPi * kPi * lm * ls * r * r_s * std::exp(-kPi * (lm * r * r + ls * r_s * r_s));
        case TopologyCase::B: return mixed_partial(r_s, r, p);
        case TopologyCase::Forbidden: return 0.0;
    }
    return 0.0;
}

}  // namespace

double joint_pdf(double r_s, double r, const NetworkParams& p, DensityForm form) {
    if (!(r_s > 0.0) || !(r > 0.0) || !std::isfinite(r_s) || !std::isfinite(r)) return 0.0;
    const JointPdfCase c = classify(r_s, r, p);
    if (c.kind == TopologyCase::Forbidden) return 0.0;
    if (form == DensityForm::MixedPartial) return literal_pdf(r_s, r, p, c.kind);

    const double R0 = inner_macro_radius(p, r_s);
    const double cos_edge = std::clamp((R0 * R0 - r_s * r_s - r * r) / (2.0 * r_s * r), -1.0, 1.0);
    const double theta_max = std::acos(cos_edge);
    const double pico = 2.0 * kPi * p.lambda_s * r_s * std::exp(-kPi * p.lambda_s * r_s * r_s);
    const double area = kPi * R0 * R0 + kPi * r * r - lens_area(r_s, R0, r);
    return pico * p.lambda_m * 2.0 * r * theta_max * std::exp(-p.lambda_m * area);
}

TopologyProbabilities topology_probabilities(const NetworkParams& p, const AnalyticOptions& opts) {
    p.validate();
    opts.quad.validate();
    TopologyProbabilities out;
    const AssociationProbabilities assoc = detail::association(p, opts);
    out.converged = assoc.converged;
    if (assoc.p_s <= 0.0) {
        if (opts.strict) throw NumericalError("topology probabilities: pico association has zero probability");
        out.converged = false;
        return out;
    }
    // The literal density carries unit mass; scaling it by p_s puts both forms
    // on the same footing before normalising by p_s.
    const double weight = opts.density == DensityForm::Exact ? 1.0 : assoc.p_s;
    const auto outer_spec = detail::scaled(opts.quad, 1.0 / std::sqrt(kPi * p.lambda_s));
    const auto inner_spec = detail::scaled(opts.quad, 1.0 / std::sqrt(kPi * p.lambda_m));

    bool inner_ok = true;
    auto region = [&](TopologyCase which) {
        auto over_r = [&](double r_s) {
            const double R0 = inner_macro_radius(p, r_s);
            double lo = 0.0;
            double hi = 0.0;
            switch (which) {
                case TopologyCase::A:
                    hi = std::max(0.0, r_s - R0);
                    break;
                case TopologyCase::B:
                    lo = std::abs(r_s - R0);
                    hi = r_s + R0;
                    break;
                default:
                    lo = r_s + R0;
                    hi = numerics::kInf;
            }
            if (hi <= lo) return 0.0;
            auto f = [&](double r) { return weight * joint_pdf(r_s, r, p, opts.density); };
            const auto res = numerics::integrate_1d(f, lo, hi, inner_spec);
            inner_ok = inner_ok && res.converged;
            return res.value;
        };
        return numerics::integrate_1d(over_r, 0.0, numerics::kInf, outer_spec);
    };

    const auto a = region(TopologyCase::A);
    const auto b = region(TopologyCase::B);
    const auto c = region(TopologyCase::C);
    out.p_A = a.value / assoc.p_s;
    out.p_B = b.value / assoc.p_s;
    out.p_C = c.value / assoc.p_s;
    out.total = out.p_A + out.p_B + out.p_C;
    out.error_estimate = (a.error_estimate + b.error_estimate + c.error_estimate) / assoc.p_s;
    out.converged = out.converged && inner_ok && a.converged && b.converged && c.converged;
    if (opts.strict && !out.converged) throw NumericalError("topology probabilities did not converge");
    return out;
}

}  // namespace hetnet::analytic
