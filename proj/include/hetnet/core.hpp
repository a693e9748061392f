#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

namespace hetnet {

inline constexpr double kPi = std::numbers::pi;

/// Which transmit power the residual self-interference of an IBFD pico scales
/// with. The coverage derivation carries beta * P_s; the SIR definition of the
/// backhaul link writes beta * P_m.
enum class SelfInterferencePower { Pico, Macro };

enum class DuplexMode { IBFD, FDD };

std::string_view to_string(DuplexMode mode);
DuplexMode duplex_mode_from_string(std::string_view name);

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    [[nodiscard]] double norm_sq() const { return x * x + y * y; }
    [[nodiscard]] double norm() const { return std::hypot(x, y); }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend bool operator==(Point2, Point2) = default;
};

/// Two-tier network model. Powers, biases and beta are linear; densities are
/// nodes per unit area.
struct NetworkParams {
    double lambda_m = 1.0;
    double lambda_s = 4.0;
    double P_m = 150.0;
    double P_s = 1.0;
    double B_m = 1.0;
    double B_s = 158.48931924611142;  // 22 dB
    double alpha_m = 2.8;
    double alpha_s = 4.0;
    double beta = 1.0;
    double eta = 0.8;
    double kappa = 0.5;
    SelfInterferencePower self_interference = SelfInterferencePower::Pico;

    /// Average number of picos backhauled by one macro.
    [[nodiscard]] double picos_per_macro() const { return lambda_s / lambda_m; }

    /// Throws InputError naming the first violated constraint.
    void validate() const;

    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

/// SIR thresholds, linear scale.
struct Thresholds {
    double T_s = 0.1;
    double T_b = 0.1;
    double T_m = 0.1;

    void validate() const;
    friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// Power decibels: 10 log10.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

/// Pico association scale: a user joins its nearest pico at distance x_s when
/// the nearest macro is farther than x_s^{alpha_s/alpha_m} / delta_m.
double delta_m(const NetworkParams& p);

/// Pico exclusion scale under macro association: every pico lies beyond
/// delta_s * r_m^{alpha_m/alpha_s}.
double delta_s(const NetworkParams& p);

/// Radius of the macro-free disc around a user served by a pico at distance r_s.
double inner_macro_radius(const NetworkParams& p, double r_s);

/// Area of the intersection of two discs with centre distance d.
double lens_area(double d, double R1, double R2);

}  // namespace hetnet
