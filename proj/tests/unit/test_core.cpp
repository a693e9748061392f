#include <cmath>
#include <random>

#include "doctest.h"
#include "hetnet/core.hpp"
#include "hetnet/error.hpp"

using namespace hetnet;

namespace {

NetworkParams with_bias_db(double bs_db, double pm = 150.0) {
    NetworkParams p;
    p.P_m = pm;
    p.B_s = db_to_linear(bs_db);
    return p;
}

// Halton sequence in bases 2 and 3: a low-discrepancy sample stream, so the
// hit fraction converges roughly like 1/N.
double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double f = 1.0;
    double r = 0.0;
    while (i > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

// Rejection sampling over the bounding box of the smaller disc.
double lens_by_rejection(double d, double R1, double R2, std::uint64_t n) {
    const double x0 = -R1;
    const double y0 = -R1;
    const double side = 2.0 * R1;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 1; i <= n; ++i) {
        const double x = x0 + side * radical_inverse(i, 2);
        const double y = y0 + side * radical_inverse(i, 3);
        const bool in1 = x * x + y * y < R1 * R1;
        const bool in2 = (x - d) * (x - d) + y * y < R2 * R2;
        hits += (in1 && in2) ? 1 : 0;
    }
    return side * side * static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace

TEST_CASE("delta_m and delta_s") {
    NetworkParams sym;
    sym.P_s = sym.P_m;
    sym.B_s = sym.B_m;
    CHECK(delta_m(sym) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(delta_s(sym) == doctest::Approx(1.0).epsilon(1e-15));

    // High-precision reference values.
    CHECK(delta_m(with_bias_db(22.0)) == doctest::Approx(1.01985595486581087).epsilon(1e-13));
    CHECK(delta_m(with_bias_db(34.0)) == doctest::Approx(2.73596328190950058).epsilon(1e-13));
    CHECK(delta_s(with_bias_db(22.0)) == doctest::Approx(1.01385812339447528).epsilon(1e-13));

    for (double bs : {-10.0, 0.0, 22.0, 40.0, 60.0}) {
        const NetworkParams p = with_bias_db(bs);
        const double expect = std::pow(delta_m(p), p.alpha_m / p.alpha_s);
        CHECK(std::abs(delta_s(p) - expect) <= 1e-12 * expect);
    }
}

TEST_CASE("delta_m scales with the bias as c^(1/alpha_m)") {
    const NetworkParams p = with_bias_db(22.0);
    for (double c : {0.01, 0.5, 3.0, 1e4}) {
        NetworkParams q = p;
        q.B_s *= c;
        const double expect = delta_m(p) * std::pow(c, 1.0 / p.alpha_m);
        CHECK(std::abs(delta_m(q) - expect) <= 1e-12 * expect);
    }
}

TEST_CASE("inner macro radius") {
    const NetworkParams p = with_bias_db(22.0);
    CHECK(inner_macro_radius(p, 1.0) == doctest::Approx(1.0 / delta_m(p)));
    CHECK(inner_macro_radius(p, 0.5) == doctest::Approx(std::pow(0.5, 4.0 / 2.8) / delta_m(p)));
}

TEST_CASE("lens area: closed cases") {
    CHECK(lens_area(3.0, 1.0, 1.0) == 0.0);
    CHECK(lens_area(2.0, 1.0, 1.0) == 0.0);
    CHECK(lens_area(0.0, 1.0, 2.0) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(lens_area(1.0, 1.0, 2.0) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(lens_area(1.0, 1.0, 1.0) == doctest::Approx(1.22836969860875685).epsilon(1e-14));
}

TEST_CASE("lens area matches rejection sampling") {
    struct Case {
        double d, R1, R2;
    };
    for (const Case c : {Case{1.0, 1.0, 1.0}, Case{0.7, 0.5, 1.1}, Case{1.4, 0.9, 0.6}, Case{0.3, 0.4, 0.5}}) {
        const double oracle = lens_by_rejection(c.d, std::min(c.R1, c.R2), std::max(c.R1, c.R2), 4'000'000);
        CAPTURE(c.d);
        CAPTURE(c.R1);
        CAPTURE(c.R2);
        CHECK(std::abs(lens_area(c.d, c.R1, c.R2) - oracle) < 1e-4);
    }
}

TEST_CASE("lens area: symmetry, bounds, monotonicity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng);
        const double b = u(rng);
        const double d = u(rng);
        CHECK(lens_area(d, a, b) == lens_area(d, b, a));
        const double v = lens_area(d, a, b);
        CHECK(v >= 0.0);
        CHECK(v <= kPi * std::min(a, b) * std::min(a, b));
    }
    for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{0.4, 1.3}, std::pair{2.0, 0.25}}) {
        double prev = lens_area(0.0, a, b);
        for (double d = 1e-3; d <= a + b + 0.01; d += 1e-3) {
            const double v = lens_area(d, a, b);
            CHECK(v <= prev + 1e-9);
            CHECK(std::abs(v - prev) < 0.01);  // continuity at this step size
            prev = v;
        }
    }
    // Tangency from both sides stays finite and within the limit values.
    CHECK(lens_area(2.0 - 1e-15, 1.0, 1.0) >= 0.0);
    CHECK(lens_area(1.0 + 1e-15, 1.0, 2.0) <= kPi);
}

TEST_CASE("parameter validation") {
    NetworkParams p;
    CHECK_NOTHROW(p.validate());
    p.alpha_m = 2.0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = NetworkParams{};
    p.eta = 1.5;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = NetworkParams{};
    p.kappa = 1.0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = NetworkParams{};
    p.lambda_s = -1.0;
    CHECK_THROWS_AS(p.validate(), InputError);
    Thresholds t;
    CHECK_NOTHROW(t.validate());
    t.T_b = 0.0;
    CHECK_THROWS_AS(t.validate(), InputError);
}

TEST_CASE("dB conversion") {
    CHECK(std::abs(db_to_linear(20.0) - 100.0) <= 1e-12 * 100.0);
    CHECK(linear_to_db(db_to_linear(-7.5)) == doctest::Approx(-7.5).epsilon(1e-14));
    CHECK(duplex_mode_from_string("fdd") == DuplexMode::FDD);
    CHECK_THROWS_AS(duplex_mode_from_string("tdd"), InputError);
}
