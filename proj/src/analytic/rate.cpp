#include <algorithm>
#include <cmath>
#include <numbers>

#include "detail.hpp"
#include "hetnet/analytic.hpp"

namespace hetnet::analytic {

double bandwidth_factor(const NetworkParams& p, DuplexMode mode) { return mode == DuplexMode::IBFD ? 1.0 : p.kappa; }

namespace {

/// Coverage below this level ends a rate integral.
constexpr double kRateFloor = 1e-8;

/// Options of the coverage integrals nested inside a rate integral: they
/// never throw (convergence is aggregated) and run at a tenth of the
/// relative accuracy, which the outer t-quadrature does not resolve anyway.
AnalyticOptions relaxed(const AnalyticOptions& opts) {
    AnalyticOptions o = opts;
    o.strict = false;
    o.quad.rel_tol = std::min(10.0 * opts.quad.rel_tol, 1e-2);
    return o;
}

struct March {
    numerics::IntegralResult result;
    bool truncated = false;
};

/// Integrate a non-increasing coverage curve g over [a, b) (b may be
/// infinite) in segments whose width doubles from `scale`. Stops once g at a
/// segment end falls below kRateFloor; past that point g decays at least
/// like 2^(-2t / (alpha scale)), so the remainder is bounded by
/// g * decay_length, which is added to the error estimate.
template <class G>
March march(G&& g, double a, double b, double scale, double decay_length, const numerics::QuadratureSpec& spec) {
    March out;
    double width = scale;
    double lo = a;
    while (lo < b) {
        const double hi = std::min(b, lo + width);
        out.result += numerics::integrate_1d(g, lo, hi, spec);
        const double g_end = g(hi);
        if (g_end < kRateFloor) {
            out.result.error_estimate += g_end * std::min(decay_length, b - hi);
            out.truncated = true;
            break;
        }
        lo = hi;
        width *= 2.0;
    }
    return out;
}

double decay_length(const NetworkParams& p, double scale) {
    return scale * std::max(p.alpha_m, p.alpha_s) / (2.0 * std::numbers::ln2);
}

}  // namespace

Evaluation rate_macro_term(const NetworkParams& p, const Thresholds& th, DuplexMode mode, const AnalyticOptions& opts) {
    p.validate();
    th.validate();
    opts.quad.validate();
    Evaluation out;
    const double prefactor = bandwidth_factor(p, mode) * (1.0 - p.eta);
    if (prefactor == 0.0) return out;

    const AnalyticOptions inner = relaxed(opts);
    Evaluation track;
    auto coverage = [&](double u) {
        const double T = std::exp2(u) - 1.0;
        if (!std::isfinite(T)) return 0.0;  // threshold beyond double range: no coverage
        const Evaluation e = coverage_macro(p, T, mode, inner);
        if (!e.converged) track.absorb(Evaluation{0.0, 0.0, false, e.failed_stage});
        return e.value;
    };
    // E[log2(1 + SIR) 1{SIR > T_m}] = u* P(SIR > T_m) + int_{u*}^inf P(SIR > 2^u - 1) du.
    const double u_star = std::log2(1.0 + th.T_m);
    const Evaluation at_threshold = coverage_macro(p, th.T_m, mode, inner);
    const March tail = march(coverage, u_star, numerics::kInf, 1.0, decay_length(p, 1.0), opts.quad);
    out.value = prefactor * (u_star * at_threshold.value + tail.result.value);
    out.absorb(at_threshold);
    out.absorb(track);
    out.absorb(tail.result, "macro rate threshold");
    out.error_estimate *= prefactor;
    return detail::finish(std::move(out), opts, "macro rate term");
}

Evaluation rate_smallcell_term(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                               const AnalyticOptions& opts) {
    p.validate();
    th.validate();
    opts.quad.validate();
    Evaluation out;
    if (p.eta == 0.0 || p.lambda_s == 0.0) return out;

    const double bw = bandwidth_factor(p, mode);
    const double n = p.picos_per_macro();
    // min(R_us, R_sm) > t with R_us = bw log2(1 + SIR_us) and
    // R_sm = (eta bw / n) log2(1 + SIR_sm); the coverage thresholds act as floors.
    const double access_scale = bw;
    const double backhaul_scale = bw * p.eta / n;
    const double t_access = access_scale * std::log2(1.0 + th.T_s);
    const double t_backhaul = backhaul_scale * std::log2(1.0 + th.T_b);
    const double t1 = std::min(t_access, t_backhaul);
    const double t2 = std::max(t_access, t_backhaul);

    const AnalyticOptions inner = relaxed(opts);
    Evaluation track;
    auto coverage = [&](double t) {
        const double T_s = std::max(std::exp2(t / access_scale) - 1.0, th.T_s);
        const double T_b = std::max(std::exp2(t / backhaul_scale) - 1.0, th.T_b);
        if (!std::isfinite(T_s) || !std::isfinite(T_b)) return 0.0;
        const Evaluation e = coverage_smallcell(p, T_s, T_b, mode, inner);
        if (!e.converged) track.absorb(Evaluation{0.0, 0.0, false, e.failed_stage});
        return e.value;
    };

    // Below t1 neither threshold moves: the integrand is the flat coverage.
    const Evaluation flat = coverage_smallcell(p, th.T_s, th.T_b, mode, inner);
    out.value = t1 * flat.value;
    out.absorb(flat);
    out.error_estimate *= t1;

    // Between the breakpoints only the threshold with the earlier breakpoint
    // grows; beyond t2 both do and the faster one sets the scale.
    const double mid_scale = t_access <= t_backhaul ? access_scale : backhaul_scale;
    const double tail_scale = std::min(access_scale, backhaul_scale);
    bool done = false;
    if (t2 > t1) {
        const March mid = march(coverage, t1, t2, mid_scale, decay_length(p, mid_scale), opts.quad);
        out.value += mid.result.value;
        out.absorb(mid.result, "small-cell rate threshold");
        done = mid.truncated;
    }
    if (!done) {
        const March tail = march(coverage, t2, numerics::kInf, tail_scale, decay_length(p, tail_scale), opts.quad);
        out.value += tail.result.value;
        out.absorb(tail.result, "small-cell rate threshold");
    }
    out.absorb(track);
    return detail::finish(std::move(out), opts, "small-cell rate term");
}

RateBreakdown rate_covered(const NetworkParams& p, const Thresholds& th, DuplexMode mode, const AnalyticOptions& opts) {
    RateBreakdown out;
    const CoverageBreakdown cov = coverage_total(p, th, mode, opts, false);
    if (!(cov.p_total > 0.0)) throw NumericalError("covered rate: conditioning event has zero probability");
    const Evaluation macro = rate_macro_term(p, th, mode, opts);
    const Evaluation small = rate_smallcell_term(p, th, mode, opts);
    out.coverage_used = cov.p_total;
    out.rate_macro_term = macro.value;
    out.rate_smallcell_term = small.value;
    out.rate_total = (macro.value + small.value) / cov.p_total;
    Evaluation acc;
    acc.absorb(Evaluation{0.0, 0.0, cov.converged, cov.failed_stage});
    acc.absorb(macro);
    acc.absorb(small);
    out.error_estimate = (macro.error_estimate + small.error_estimate) / cov.p_total +
                         out.rate_total * cov.error_estimate / cov.p_total;
    out.converged = acc.converged;
    out.failed_stage = acc.failed_stage;
    return out;
}

}  // namespace hetnet::analytic
