#pragma once

// Adaptive Gauss-Kronrod quadrature on finite and semi-infinite intervals,
// and planar integrals over the complement of (at most two) open discs.
//
// Integrands are passed either as scalar callables `double(double)` or as
// batch callables `void(std::span<const double> x, std::span<double> y)` that
// fill y[i] = f(x[i]) for a whole 15-node Kronrod panel at once; the batch
// form lets the caller vectorise the panel.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "hetnet/core.hpp"

namespace hetnet::numerics {

struct QuadratureSpec {
    double abs_tol = 1e-7;
    double rel_tol = 1e-5;
    int max_subdivisions = 200;
    /// Length scale R of the semi-infinite treatment: [a, inf) is split at
    /// a + R and the remainder mapped to a finite interval.
    double truncation_radius = 1.0;

    void validate() const;
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    long evaluations = 0;

    IntegralResult& operator+=(const IntegralResult& other) {
        value += other.value;
        error_estimate += other.error_estimate;
        converged = converged && other.converged;
        evaluations += other.evaluations;
        return *this;
    }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

// 15-point Kronrod abscissae (descending from the edge) and weights; the
// embedded 7-point Gauss rule uses the odd-indexed abscissae.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr std::size_t kPanelNodes = 15;

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
    friend bool operator<(const Panel& l, const Panel& r) { return l.error < r.error; }
};

/// Node layout: x[0] centre, x[2j+1] = c - h*xgk[j], x[2j+2] = c + h*xgk[j].
inline void panel_nodes(double a, double b, std::span<double, kPanelNodes> x) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    x[0] = c;
    for (std::size_t j = 0; j < 7; ++j) {
        x[2 * j + 1] = c - h * kXgk[j];
        x[2 * j + 2] = c + h * kXgk[j];
    }
}

/// Combine panel samples into the Kronrod value and an error estimate.
/// The estimate is |K15 - G7| (the error of the embedded Gauss rule, so an
/// upper bound for smooth integrands) with a roundoff floor. QUADPACK's
/// (200 err / resasc)^1.5 inflation is not applied: nested integrals
/// compound it into orders-of-magnitude over-refinement.
inline Panel panel_rule(double a, double b, std::span<const double, kPanelNodes> y) {
    const double h = 0.5 * (b - a);
    const double fc = y[0];
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    double resabs = std::abs(resk);
    for (std::size_t j = 0; j < 7; ++j) {
        const double f1 = y[2 * j + 1];
        const double f2 = y[2 * j + 2];
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    double err = std::abs((resk - resg) * h);
    resabs *= std::abs(h);
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon()))
        err = std::max(err, roundoff);
    if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
    return {a, b, resk * h, err};
}

template <class Batch>
Panel eval_panel(Batch& fb, double a, double b) {
    std::array<double, kPanelNodes> x{};
    std::array<double, kPanelNodes> y{};
    panel_nodes(a, b, x);
    fb(std::span<const double>(x), std::span<double>(y));
    return panel_rule(a, b, y);
}

template <class Batch>
IntegralResult adaptive_gk15(Batch& fb, double a, double b, const QuadratureSpec& spec) {
    IntegralResult out;
    if (a == b) return out;

    std::vector<Panel> heap;
    heap.reserve(static_cast<std::size_t>(spec.max_subdivisions) + 1);
    heap.push_back(eval_panel(fb, a, b));
    out.evaluations = static_cast<long>(kPanelNodes);
    double total = heap.front().value;
    double total_err = heap.front().error;

    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    int subdivisions = 1;
    while (total_err > tolerance() && subdivisions < spec.max_subdivisions) {
        std::pop_heap(heap.begin(), heap.end());
        const Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {  // interval exhausted at double precision
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        const Panel left = eval_panel(fb, worst.a, mid);
        const Panel right = eval_panel(fb, mid, worst.b);
        out.evaluations += 2 * static_cast<long>(kPanelNodes);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        ++subdivisions;
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    total_err = 0.0;
    for (const Panel& p : heap) {
        total += p.value;
        total_err += p.error;
    }
    out.value = total;
    out.error_estimate = total_err;
    out.converged = std::isfinite(total) && total_err <= tolerance();
    return out;
}

}  // namespace detail

/// Integrate a batch integrand over [lower, upper]; upper may be +infinity.
///
/// A semi-infinite range is split at c = max(lower + R, R), R the QuadratureSpec's
/// truncation_radius. [lower, c] is integrated directly; the tail uses
/// t = c exp(u / (1 - u)), which turns algebraic decay t^-p into exponential
/// decay in u / (1 - u) and so keeps slowly decaying tails (p near 1) fully
/// resolved instead of losing the mass beyond the last representable node.
template <class Batch>
IntegralResult integrate_1d_batch(Batch&& fb, double lower, double upper, const QuadratureSpec& spec) {
    if (std::isfinite(upper)) return detail::adaptive_gk15(fb, lower, upper, spec);

    const double c = std::max(lower + spec.truncation_radius, spec.truncation_radius);
    IntegralResult head = detail::adaptive_gk15(fb, lower, c, spec);
    auto mapped = [&](std::span<const double> u, std::span<double> y) {
        // Nodes whose image overflows to infinity sit at the far endpoint,
        // where the integrand has decayed: they contribute 0 and are not
        // passed to the integrand.
        std::array<double, detail::kPanelNodes> t{};
        std::array<double, detail::kPanelNodes> jac{};
        std::array<double, detail::kPanelNodes> fy{};
        std::array<std::size_t, detail::kPanelNodes> slot{};
        std::size_t m = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            y[i] = 0.0;
            const double one_minus = 1.0 - u[i];
            const double ti = c * std::exp(u[i] / one_minus);
            if (!std::isfinite(ti)) continue;
            t[m] = ti;
            jac[m] = ti / (one_minus * one_minus);
            slot[m++] = i;
        }
        if (m == 0) return;
        fb(std::span<const double>(t.data(), m), std::span<double>(fy.data(), m));
        for (std::size_t k = 0; k < m; ++k) {
            const double v = fy[k] * jac[k];
            y[slot[k]] = std::isfinite(v) ? v : 0.0;
        }
    };
    QuadratureSpec tail_spec = spec;
    tail_spec.abs_tol = 0.5 * spec.abs_tol;
    tail_spec.rel_tol = 0.5 * spec.rel_tol;
    head += detail::adaptive_gk15(mapped, 0.0, 1.0, tail_spec);
    return head;
}

/// Integrate a scalar integrand f(t) over [lower, upper]; upper may be +infinity.
template <class F>
IntegralResult integrate_1d(F&& f, double lower, double upper, const QuadratureSpec& spec) {
    auto batch = [&](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
    };
    return integrate_1d_batch(batch, lower, upper, spec);
}

struct Disc {
    Point2 center;
    double radius = 0.0;
};

/// Union of at most two open discs removed from the plane.
class ExclusionRegion {
public:
    ExclusionRegion() = default;
    explicit ExclusionRegion(Disc a) { add(a); }
    ExclusionRegion(Disc a, Disc b) {
        add(a);
        add(b);
    }

    void add(Disc d);
    [[nodiscard]] std::span<const Disc> discs() const { return {discs_.data(), count_}; }
    /// All centres on the x-axis, so the region is mirror-symmetric in y.
    [[nodiscard]] bool symmetric() const;

    /// Radii at which the angular make-up of the excluded set changes.
    [[nodiscard]] std::vector<double> critical_radii() const;

    /// Allowed angular intervals on the circle of radius rho. In symmetric
    /// mode only [0, pi] is reported. Returns the number of intervals written.
    std::size_t allowed_arcs(double rho, bool half_plane, std::span<std::array<double, 2>, 3> out) const;

private:
    std::array<Disc, 2> discs_{};
    std::size_t count_ = 0;
};

/// Integrate f over R^2 minus the exclusion region, in polar coordinates
/// about the origin. The batch integrand is called as
/// fb(rho, std::span<const double> phi, std::span<double> out).
/// `radial_breaks` adds caller-known feature radii to the radial split points.
template <class Batch>
IntegralResult integrate_annulus_batch(Batch&& fb, const ExclusionRegion& exclusion, const QuadratureSpec& spec,
                                       std::span<const double> radial_breaks = {}) {
    const bool half = exclusion.symmetric();
    const double arc_factor = half ? 2.0 : 1.0;

    QuadratureSpec angular = spec;
    angular.rel_tol = spec.rel_tol;
    angular.abs_tol = std::numeric_limits<double>::min();

    bool angular_ok = true;
    long angular_evals = 0;
    auto radial = [&](double rho) {
        std::array<std::array<double, 2>, 3> arcs{};
        const std::size_t n = exclusion.allowed_arcs(rho, half, arcs);
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            auto at_rho = [&](std::span<const double> phi, std::span<double> y) { fb(rho, phi, y); };
            const IntegralResult r = detail::adaptive_gk15(at_rho, arcs[k][0], arcs[k][1], angular);
            angular_ok = angular_ok && r.converged;
            angular_evals += r.evaluations;
            acc += r.value;
        }
        return arc_factor * rho * acc;
    };

    std::vector<double> cuts = exclusion.critical_radii();
    for (double b : radial_breaks)
        if (b > 0.0 && std::isfinite(b)) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    IntegralResult total;
    double lo = 0.0;
    for (double hi : cuts) {
        if (hi <= lo) continue;
        std::array<std::array<double, 2>, 3> arcs{};
        if (exclusion.allowed_arcs(0.5 * (lo + hi), half, arcs) > 0) total += integrate_1d(radial, lo, hi, spec);
        lo = hi;
    }
    total += integrate_1d(radial, lo, kInf, spec);
    total.converged = total.converged && angular_ok;
    total.evaluations += angular_evals;
    return total;
}

/// Scalar-integrand convenience form: f(rho, phi).
template <class F>
IntegralResult integrate_annulus(F&& f, const ExclusionRegion& exclusion, const QuadratureSpec& spec) {
    auto batch = [&](double rho, std::span<const double> phi, std::span<double> y) {
        for (std::size_t i = 0; i < phi.size(); ++i) y[i] = f(rho, phi[i]);
    };
    return integrate_annulus_batch(batch, exclusion, spec);
}

}  // namespace hetnet::numerics
