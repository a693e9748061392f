#include "hetnet/core.hpp"

#include <algorithm>
#include <string>

#include "hetnet/error.hpp"

namespace hetnet {

std::string_view to_string(DuplexMode mode) { return mode == DuplexMode::IBFD ? "IBFD" : "FDD"; }

DuplexMode duplex_mode_from_string(std::string_view name) {
    if (name == "IBFD" || name == "ibfd") return DuplexMode::IBFD;
    if (name == "FDD" || name == "fdd") return DuplexMode::FDD;
    throw InputError("unknown duplex mode '" + std::string(name) + "' (expected IBFD or FDD)");
}

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw InputError(std::string("invalid network parameters: ") + what);
}

}  // namespace

void NetworkParams::validate() const {
    require(std::isfinite(lambda_m) && lambda_m > 0.0, "lambda_m must be > 0");
    require(std::isfinite(lambda_s) && lambda_s >= 0.0, "lambda_s must be >= 0");
    require(std::isfinite(P_m) && P_m > 0.0, "P_m must be > 0");
    require(std::isfinite(P_s) && P_s > 0.0, "P_s must be > 0");
    require(std::isfinite(B_m) && B_m > 0.0, "B_m must be > 0");
    require(std::isfinite(B_s) && B_s > 0.0, "B_s must be > 0");
    require(alpha_m > 2.0 && std::isfinite(alpha_m), "alpha_m must be > 2");
    require(alpha_s > 2.0 && std::isfinite(alpha_s), "alpha_s must be > 2");
    require(beta >= 0.0 && !std::isnan(beta), "beta must be >= 0");
    require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
    require(kappa >= 0.0 && kappa < 1.0, "kappa must lie in [0, 1)");
}

void Thresholds::validate() const {
    if (!(T_s > 0.0) || !(T_b > 0.0) || !(T_m > 0.0))
        throw InputError("SIR thresholds must be strictly positive");
}

double delta_m(const NetworkParams& p) {
    return std::pow((p.P_s * p.B_s) / (p.P_m * p.B_m), 1.0 / p.alpha_m);
}

double delta_s(const NetworkParams& p) {
    return std::pow((p.P_s * p.B_s) / (p.P_m * p.B_m), 1.0 / p.alpha_s);
}

double inner_macro_radius(const NetworkParams& p, double r_s) {
    return std::pow(r_s, p.alpha_s / p.alpha_m) / delta_m(p);
}

double lens_area(double d, double R1, double R2) {
    const double r_small = std::min(R1, R2);
    const double r_big = std::max(R1, R2);
    if (d >= R1 + R2) return 0.0;
    if (d <= r_big - r_small) return kPi * r_small * r_small;

    // Evaluate with the smaller radius first so the result is symmetric in
    // (R1, R2) bit for bit.
    const double a = r_small;
    const double b = r_big;
    const double ca = std::clamp((d * d + a * a - b * b) / (2.0 * d * a), -1.0, 1.0);
    const double cb = std::clamp((d * d + b * b - a * a) / (2.0 * d * b), -1.0, 1.0);
    const double kite = (-d + a + b) * (d + a - b) * (d - a + b) * (d + a + b);
    const double area = a * a * std::acos(ca) + b * b * std::acos(cb) - 0.5 * std::sqrt(std::max(kite, 0.0));
    return std::clamp(area, 0.0, kPi * a * a);
}

}  // namespace hetnet
