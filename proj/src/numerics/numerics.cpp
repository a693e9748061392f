#include "hetnet/numerics.hpp"

#include <string>

#include "hetnet/error.hpp"

namespace hetnet::numerics {

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0)) throw InputError("quadrature abs_tol must be > 0");
    if (!(rel_tol > 0.0)) throw InputError("quadrature rel_tol must be > 0");
    if (max_subdivisions < 1) throw InputError("quadrature max_subdivisions must be >= 1");
    if (!(truncation_radius > 0.0) || !std::isfinite(truncation_radius))
        throw InputError("quadrature truncation_radius must be finite and > 0");
}

void ExclusionRegion::add(Disc d) {
    if (count_ == discs_.size()) throw InputError("exclusion region holds at most two discs");
    if (!(d.radius >= 0.0)) throw InputError("exclusion disc radius must be >= 0");
    discs_[count_++] = d;
}

bool ExclusionRegion::symmetric() const {
    for (const Disc& d : discs())
        if (d.center.y != 0.0) return false;
    return true;
}

std::vector<double> ExclusionRegion::critical_radii() const {
    std::vector<double> cuts;
    for (const Disc& d : discs()) {
        if (d.radius <= 0.0) continue;
        const double dc = d.center.norm();
        cuts.push_back(std::abs(dc - d.radius));
        cuts.push_back(dc + d.radius);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::erase_if(cuts, [](double c) { return !(c > 0.0); });
    return cuts;
}

namespace {

// Half-width of the arc of the circle |z| = rho lying inside the disc, or
// a negative value if the disc covers nothing, or >= pi if it covers all.
double covered_half_width(const Disc& d, double rho) {
    if (d.radius <= 0.0) return -1.0;
    const double dc = d.center.norm();
    if (dc == 0.0) return rho < d.radius ? kPi : -1.0;
    const double k = (rho * rho + dc * dc - d.radius * d.radius) / (2.0 * rho * dc);
    if (k >= 1.0) return -1.0;
    if (k <= -1.0) return kPi;
    return std::acos(k);
}

}  // namespace

std::size_t ExclusionRegion::allowed_arcs(double rho, bool half_plane,
                                          std::span<std::array<double, 2>, 3> out) const {
    std::array<double, 2> width{-1.0, -1.0};
    std::array<double, 2> centre{0.0, 0.0};
    std::size_t active = 0;
    for (const Disc& d : discs()) {
        const double w = covered_half_width(d, rho);
        if (w >= kPi) return 0;
        if (w < 0.0) continue;
        width[active] = w;
        centre[active] = std::atan2(d.center.y, d.center.x);
        ++active;
    }

    if (half_plane) {
        double lo = 0.0;
        double hi = kPi;
        for (std::size_t i = 0; i < active; ++i) {
            if (centre[i] == 0.0)
                lo = std::max(lo, width[i]);
            else
                hi = std::min(hi, kPi - width[i]);
        }
        if (!(hi > lo)) return 0;
        out[0] = {lo, hi};
        return 1;
    }

    if (active == 0) {
        out[0] = {-kPi, kPi};
        return 1;
    }
    // Walk the circle starting at the end of the first covered arc; in that
    // frame the first arc occupies [L, 2 pi) with L = 2 pi - 2 w0.
    const double start = centre[0] + width[0];
    const double length = 2.0 * kPi - 2.0 * width[0];
    if (!(length > 0.0)) return 0;
    if (active == 1) {
        out[0] = {start, start + length};
        return 1;
    }
    double t = std::fmod(centre[1] - start, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    double a = t - width[1];
    double b = t + width[1];
    // Collect the second arc as up to two pieces within [0, 2 pi).
    std::array<std::array<double, 2>, 2> cut{};
    std::size_t n_cut = 0;
    if (a < 0.0) {
        cut[n_cut++] = {0.0, b};
        cut[n_cut++] = {2.0 * kPi + a, 2.0 * kPi};
    } else if (b > 2.0 * kPi) {
        cut[n_cut++] = {0.0, b - 2.0 * kPi};
        cut[n_cut++] = {a, 2.0 * kPi};
    } else {
        cut[n_cut++] = {a, b};
    }
    std::sort(cut.begin(), cut.begin() + static_cast<std::ptrdiff_t>(n_cut));

    std::size_t n = 0;
    double cursor = 0.0;
    for (std::size_t i = 0; i < n_cut; ++i) {
        const double lo = std::min(cut[i][0], length);
        if (lo > cursor) out[n++] = {start + cursor, start + lo};
        cursor = std::max(cursor, cut[i][1]);
        if (cursor >= length) break;
    }
    if (cursor < length) out[n++] = {start + cursor, start + length};
    return n;
}

}  // namespace hetnet::numerics
