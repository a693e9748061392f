#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "detail.hpp"
#include "hetnet/analytic.hpp"
#include "hetnet/kernels.hpp"

namespace hetnet::analytic {

double interference_tail(double lower, double alpha) {
    if (!(lower < numerics::kInf)) return 0.0;
    numerics::QuadratureSpec spec;
    spec.abs_tol = 1e-14;
    spec.rel_tol = 1e-12;
    spec.max_subdivisions = 400;
    const double h = 0.5 * alpha;
    auto f = [h](double u) { return 1.0 / (1.0 + std::pow(u, h)); };
    return numerics::integrate_1d(f, std::max(lower, 0.0), numerics::kInf, spec).value;
}

double SmallCellTerms::factor() const {
    return std::exp(-pico_functional - macro_functional - self_interference) * backhaul_macro;
}

namespace {

using numerics::Disc;
using numerics::ExclusionRegion;
using numerics::IntegralResult;
using numerics::kInf;

/// Access-link pico interference outside the serving distance with the
/// backhaul factor switched off: pi r_s^2 T^(2/alpha) rho(T, alpha) per r_s^2.
double access_closed_form(double T, double alpha) {
    if (T <= 0.0) return 0.0;
    return kPi * std::pow(T, 2.0 / alpha) * interference_tail(std::pow(T, -2.0 / alpha), alpha);
}

void note(Evaluation& track, const IntegralResult& r, const char* stage) {
    if (!r.converged) track.absorb(IntegralResult{0.0, 0.0, false, 0}, stage);
}

class SmallCellModel {
public:
    SmallCellModel(const NetworkParams& p, double T_s, double T_b, DuplexMode mode, const AnalyticOptions& opts)
        : p_(p), T_s_(T_s), T_b_(T_b), mode_(mode), opts_(opts), k_(kernels::active()),
          access_(access_closed_form(T_s, p.alpha_s)) {}

    /// Terms of the integrand; convergence failures are noted in `track`.
    ///
    /// Each functional 1 - g1 g2 over a region is split as p1 + p2 - p1 p2,
    /// p = 1 - g. A factor radial about one point integrates in 1-D against
    /// the angular measure the region leaves on each circle; only the product
    /// term needs a planar integral, and it decays twice as fast.
    SmallCellTerms terms(double r_s, double r, Evaluation& track) const {
        SmallCellTerms t;
        const bool ibfd = mode_ == DuplexMode::IBFD;
        const double s1 = T_s_ * std::pow(r_s, p_.alpha_s);
        const double s2 = T_b_ * std::pow(r, p_.alpha_m) * p_.P_s / p_.P_m;
        const double s1_macro = ibfd ? s1 * p_.P_m / p_.P_s : 0.0;
        const double s2_macro = T_b_ * std::pow(r, p_.alpha_m);
        const double R0 = inner_macro_radius(p_, r_s);

        // Picos outside |z| > r_s: access part in closed form; the backhaul
        // part about the serving pico, whose circles lose the user's disc.
        t.pico_functional = p_.lambda_s * access_ * r_s * r_s;
        if (ibfd && s2 > 0.0 && p_.lambda_s > 0.0) {
            const auto spec = spec_for(r_s + std::pow(s2, 1.0 / p_.alpha_s), p_.lambda_s);
            const IntegralResult q = radial_outside(s2, p_.alpha_s, 0.0, r_s, r_s, spec);
            note(track, q, "pico interference functional");
            double value = q.value;
            if (s1 > 0.0) {
                const IntegralResult x = pico_product(r_s, s1, s2, spec);
                note(track, x, "pico interference functional");
                value -= x.value;
            }
            t.pico_functional += p_.lambda_s * std::max(value, 0.0);
        }

        // Macros outside B(o, R0) and B(x_s, r).
        if (s1_macro > 0.0 || s2_macro > 0.0) {
            const double length = r_s + r + std::pow(std::max(s1_macro, s2_macro), 1.0 / p_.alpha_m);
            const auto spec = spec_for(length, p_.lambda_m);
            double value = 0.0;
            if (s1_macro > 0.0) {
                const IntegralResult a = radial_outside(s1_macro, p_.alpha_m, R0, r_s, r, spec);
                note(track, a, "macro interference functional");
                value += a.value;
            }
            if (s2_macro > 0.0) {
                const IntegralResult b = radial_outside(s2_macro, p_.alpha_m, r, r_s, R0, spec);
                note(track, b, "macro interference functional");
                value += b.value;
            }
            if (s1_macro > 0.0 && s2_macro > 0.0) {
                const IntegralResult x = macro_product(r_s, r, R0, s1_macro, s2_macro, spec);
                note(track, x, "macro interference functional");
                value -= x.value;
            }
            t.macro_functional = p_.lambda_m * std::max(value, 0.0);
        }

        if (ibfd) {
            const double si_power = p_.self_interference == SelfInterferencePower::Pico ? p_.P_s : p_.P_m;
            t.self_interference = p_.beta * T_b_ * std::pow(r, p_.alpha_m) * si_power / p_.P_m;
            if (s1_macro > 0.0) {
                const IntegralResult th = backhaul_macro_arc(r_s, r, s1_macro);
                note(track, th, "backhaul-macro arc");
                t.backhaul_macro = th.value;
            }
        }
        t.converged = track.converged;
        return t;
    }

private:
    /// Integral of p(s, |w|) = s / (s + |w|^alpha) over |w| > lower minus the
    /// disc of radius R whose centre lies at distance c from the origin of w.
    IntegralResult radial_outside(double s, double alpha, double lower, double c, double R,
                                  const numerics::QuadratureSpec& spec) const {
        const double half = 0.5 * alpha;
        auto fb = [&](std::span<const double> rho, std::span<double> out) {
            std::array<double, numerics::detail::kPanelNodes> d{};
            for (std::size_t i = 0; i < rho.size(); ++i) d[i] = rho[i] * rho[i];
            k_.pgfl_complement(d.data(), d.data(), rho.size(), s, 0.0, half, out.data());
            for (std::size_t i = 0; i < rho.size(); ++i) {
                const double k = std::clamp((d[i] + c * c - R * R) / (2.0 * rho[i] * c), -1.0, 1.0);
                out[i] *= rho[i] * 2.0 * (kPi - std::acos(k));
            }
        };
        std::array<double, 3> cuts{std::abs(c - R), c + R, numerics::kInf};
        IntegralResult total;
        double lo = lower;
        for (double hi : cuts) {
            if (hi <= lo) continue;
            total += numerics::integrate_1d_batch(fb, lo, hi, spec);
            lo = hi;
        }
        return total;
    }

    /// Integral over |z| > r_s of p(s2, |z - x_s|) p(s1, |z|), about the pico.
    IntegralResult pico_product(double r_s, double s1, double s2, const numerics::QuadratureSpec& spec) const {
        const double a = p_.alpha_s;
        const ExclusionRegion user_disc(Disc{{-r_s, 0.0}, r_s});
        auto fb = [&](double d, std::span<const double> phi, std::span<double> out) {
            const double q = s2 / (s2 + std::pow(d, a));
            std::array<double, numerics::detail::kPanelNodes> d1{};
            for (std::size_t i = 0; i < phi.size(); ++i) d1[i] = d * d + r_s * r_s + 2.0 * d * r_s * std::cos(phi[i]);
            k_.pgfl_complement(d1.data(), d1.data(), phi.size(), s1, 0.0, 0.5 * a, out.data());
            for (std::size_t i = 0; i < phi.size(); ++i) out[i] *= q;
        };
        return numerics::integrate_annulus_batch(fb, user_disc, spec);
    }

    /// Integral over the plane minus B(o, R0) and B(x_s, r) of
    /// p(s1', |v|) p(s2', |v - x_s|), about the user.
    IntegralResult macro_product(double r_s, double r, double R0, double s1, double s2,
                                 const numerics::QuadratureSpec& spec) const {
        const double a = p_.alpha_m;
        const ExclusionRegion region(Disc{{0.0, 0.0}, R0}, Disc{{r_s, 0.0}, r});
        auto fb = [&](double rho, std::span<const double> phi, std::span<double> out) {
            const double p1 = s1 / (s1 + std::pow(rho, a));
            std::array<double, numerics::detail::kPanelNodes> d2{};
            for (std::size_t i = 0; i < phi.size(); ++i) d2[i] = rho * rho + r_s * r_s - 2.0 * rho * r_s * std::cos(phi[i]);
            k_.pgfl_complement(d2.data(), d2.data(), phi.size(), s2, 0.0, 0.5 * a, out.data());
            for (std::size_t i = 0; i < phi.size(); ++i) out[i] *= p1;
        };
        return numerics::integrate_annulus_batch(fb, region, spec);
    }

    /// Mean of g(s1', r_m) with the backhaul macro's angle uniform over the
    /// admissible arc (or the whole circle for the literal density).
    IntegralResult backhaul_macro_arc(double r_s, double r, double s1) const {
        double theta_max = kPi;
        if (opts_.density == DensityForm::Exact) {
            const double R0 = inner_macro_radius(p_, r_s);
            theta_max = std::acos(std::clamp((R0 * R0 - r_s * r_s - r * r) / (2.0 * r_s * r), -1.0, 1.0));
        }
        auto fb = [&](std::span<const double> theta, std::span<double> out) {
            std::array<double, numerics::detail::kPanelNodes> d1{};
            for (std::size_t i = 0; i < theta.size(); ++i)
                d1[i] = r_s * r_s + r * r + 2.0 * r_s * r * std::cos(theta[i]);
            k_.pgfl_complement(d1.data(), d1.data(), theta.size(), s1, 0.0, 0.5 * p_.alpha_m, out.data());
        };
        if (theta_max < 1e-12) {
            const double d1 = (r_s + r) * (r_s + r);
            double pc = 0.0;
            k_.pgfl_complement(&d1, &d1, 1, s1, 0.0, 0.5 * p_.alpha_m, &pc);
            return {1.0 - pc, 0.0, true, 1};
        }
        numerics::QuadratureSpec spec = opts_.quad;
        spec.rel_tol = 0.1 * opts_.quad.rel_tol;
        spec.abs_tol = 0.1 * opts_.quad.rel_tol * theta_max;
        IntegralResult res = numerics::integrate_1d_batch(fb, 0.0, theta_max, spec);
        res.value = 1.0 - res.value / theta_max;
        res.error_estimate /= theta_max;
        return res;
    }

    numerics::QuadratureSpec spec_for(double length, double lambda) const {
        numerics::QuadratureSpec s = detail::exponent_spec(opts_.quad, length);
        s.abs_tol /= lambda;
        return s;
    }

    const NetworkParams& p_;
    double T_s_;
    double T_b_;
    DuplexMode mode_;
    const AnalyticOptions& opts_;
    const kernels::KernelTable& k_;
    double access_;
};

void check_threshold(double T, const char* name) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw InputError(std::string(name) + " must be finite and >= 0");
}

}  // namespace

SmallCellTerms smallcell_terms(const NetworkParams& p, double T_s, double T_b, DuplexMode mode, double r_s, double r,
                               const AnalyticOptions& opts) {
    p.validate();
    opts.quad.validate();
    check_threshold(T_s, "T_s");
    check_threshold(T_b, "T_b");
    if (!(r_s > 0.0) || !(r > 0.0)) throw InputError("smallcell_terms: distances must be > 0");
    Evaluation track;
    return SmallCellModel(p, T_s, T_b, mode, opts).terms(r_s, r, track);
}

namespace {

struct Regions {
    bool a = true;
    bool b = true;
    bool c = true;
};

/// Joint small-cell coverage restricted to the chosen topology cases.
Evaluation smallcell_integral(const NetworkParams& p, double T_s, double T_b, DuplexMode mode,
                              const AnalyticOptions& opts, Regions regions) {
    Evaluation out;
    if (p.lambda_s == 0.0) return out;

    const AssociationProbabilities assoc = detail::association(p, opts);
    const double weight = opts.density == DensityForm::Exact ? 1.0 : assoc.p_s;
    const SmallCellModel model(p, T_s, T_b, mode, opts);
    const auto outer_spec = detail::scaled(opts.quad, 1.0 / std::sqrt(kPi * p.lambda_s));
    const auto inner_spec = detail::scaled(opts.quad, 1.0 / std::sqrt(kPi * p.lambda_m));

    Evaluation track;
    double worst_inner = 0.0;
    auto over_r = [&](double r_s) {
        auto integrand = [&](double r) {
            const double f = weight * joint_pdf(r_s, r, p, opts.density);
            if (!(f > 0.0)) return 0.0;
            return f * model.terms(r_s, r, track).factor();
        };
        const double R0 = inner_macro_radius(p, r_s);
        const double lo = std::abs(r_s - R0);
        const double hi = r_s + R0;
        IntegralResult acc;
        if (regions.a && r_s > R0) acc += numerics::integrate_1d(integrand, 0.0, lo, inner_spec);
        if (regions.b) acc += numerics::integrate_1d(integrand, lo, hi, inner_spec);
        if (regions.c) acc += numerics::integrate_1d(integrand, hi, kInf, inner_spec);
        note(track, acc, "backhaul distance");
        worst_inner = std::max(worst_inner, acc.error_estimate);
        return acc.value;
    };
    const IntegralResult res = numerics::integrate_1d(over_r, 0.0, kInf, outer_spec);
    out.value = res.value;
    out.absorb(track);
    out.absorb(res, "access distance");
    out.error_estimate += worst_inner * 2.0 / std::sqrt(kPi * p.lambda_s);
    if (!assoc.converged) out.absorb(IntegralResult{0.0, assoc.error_estimate, false, 0}, "association");
    return out;
}

}  // namespace

Evaluation coverage_smallcell(const NetworkParams& p, double T_s, double T_b, DuplexMode mode,
                              const AnalyticOptions& opts) {
    p.validate();
    opts.quad.validate();
    check_threshold(T_s, "T_s");
    check_threshold(T_b, "T_b");
    Regions all;
    all.b = !opts.approx_ac;
    return detail::finish(smallcell_integral(p, T_s, T_b, mode, opts, all), opts, "small-cell coverage");
}

Evaluation intersection_given_coverage(const NetworkParams& p, double T_s, double T_b, DuplexMode mode,
                                       const AnalyticOptions& opts) {
    p.validate();
    opts.quad.validate();
    check_threshold(T_s, "T_s");
    check_threshold(T_b, "T_b");
    const Evaluation joint = smallcell_integral(p, T_s, T_b, mode, opts, Regions{false, true, false});
    const Evaluation full = smallcell_integral(p, T_s, T_b, mode, opts, Regions{});
    if (!(full.value > 0.0)) throw NumericalError("intersection probability: conditioning event has zero probability");
    Evaluation out;
    out.value = joint.value / full.value;
    out.absorb(joint);
    out.absorb(full);
    out.error_estimate = (joint.error_estimate + out.value * full.error_estimate) / full.value;
    return detail::finish(std::move(out), opts, "intersection probability");
}

Evaluation coverage_macro(const NetworkParams& p, double T_m, DuplexMode mode, const AnalyticOptions& opts) {
    p.validate();
    opts.quad.validate();
    check_threshold(T_m, "T_m");

    const double am = p.alpha_m;
    const double as = p.alpha_s;
    const double ds = delta_s(p);
    const double macro_tail = T_m > 0.0 ? std::pow(T_m, 2.0 / am) * interference_tail(std::pow(T_m, -2.0 / am), am) : 0.0;
    double pico_tail = 0.0;
    if (mode == DuplexMode::IBFD && T_m > 0.0 && p.lambda_s > 0.0)
        pico_tail = std::pow(p.P_s * T_m / p.P_m, 2.0 / as) *
                    interference_tail(std::pow(p.B_s / (p.B_m * T_m), 2.0 / as), as);

    auto coverage_given = [&](double r) {
        const double rr = std::pow(r, 2.0 * am / as);
        return std::exp(-kPi * p.lambda_m * r * r * macro_tail - kPi * p.lambda_s * rr * pico_tail);
    };
    const auto spec = detail::scaled(opts.quad, 1.0 / std::sqrt(kPi * p.lambda_m));
    Evaluation out;
    IntegralResult res;
    if (!opts.macro_literal_2d || p.lambda_s == 0.0) {
        auto f = [&](double r) {
            const double rr = std::pow(r, 2.0 * am / as);
            return 2.0 * kPi * p.lambda_m * r * std::exp(-kPi * p.lambda_m * r * r - kPi * p.lambda_s * ds * ds * rr) *
                   coverage_given(r);
        };
        res = numerics::integrate_1d(f, 0.0, kInf, spec);
    } else {
        const auto inner_spec = detail::scaled(opts.quad, 1.0 / std::sqrt(kPi * p.lambda_s));
        bool inner_ok = true;
        auto f = [&](double r) {
            auto pico = [&](double r_s) {
                return 2.0 * kPi * p.lambda_s * r_s * std::exp(-kPi * p.lambda_s * r_s * r_s);
            };
            const auto in = numerics::integrate_1d(pico, ds * std::pow(r, am / as), kInf, inner_spec);
            inner_ok = inner_ok && in.converged;
            return 2.0 * kPi * p.lambda_m * r * std::exp(-kPi * p.lambda_m * r * r) * in.value * coverage_given(r);
        };
        res = numerics::integrate_1d(f, 0.0, kInf, spec);
        if (!inner_ok) out.absorb(IntegralResult{0.0, 0.0, false, 0}, "pico distance");
    }
    out.value = res.value;
    out.absorb(res, "macro distance");
    return detail::finish(std::move(out), opts, "macro coverage");
}

CoverageBreakdown coverage_total(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                                 const AnalyticOptions& opts, bool with_link_conditionals) {
    p.validate();
    th.validate();
    opts.quad.validate();
    CoverageBreakdown out;
    const AssociationProbabilities assoc = detail::association(p, opts);
    out.p_assoc_s = assoc.p_s;
    out.p_assoc_m = assoc.p_m;

    Evaluation acc;
    if (!assoc.converged) acc.absorb(IntegralResult{0.0, assoc.error_estimate, false, 0}, "association");
    const Evaluation us = coverage_smallcell(p, th.T_s, th.T_b, mode, opts);
    const Evaluation um = coverage_macro(p, th.T_m, mode, opts);
    acc.absorb(us);
    acc.absorb(um);
    out.p_smallcell_joint = us.value;
    out.p_macro_joint = um.value;
    out.p_total = us.value + um.value;

    if (with_link_conditionals && assoc.p_s > 0.0) {
        const Evaluation backhaul = coverage_smallcell(p, 0.0, th.T_b, mode, opts);
        const Evaluation access = coverage_smallcell(p, th.T_s, 0.0, mode, opts);
        acc.absorb(Evaluation{0.0, 0.0, backhaul.converged, backhaul.failed_stage});
        acc.absorb(Evaluation{0.0, 0.0, access.converged, access.failed_stage});
        out.backhaul_conditional = backhaul.value / assoc.p_s;
        out.access_conditional = access.value / assoc.p_s;
    }
    out.error_estimate = acc.error_estimate;
    out.converged = acc.converged;
    out.failed_stage = acc.failed_stage;
    if (opts.strict && !out.converged) throw NumericalError("coverage did not converge (" + out.failed_stage + ")");
    return out;
}

}  // namespace hetnet::analytic
