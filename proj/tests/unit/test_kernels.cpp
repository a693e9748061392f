#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "hetnet/kernels.hpp"

using namespace hetnet::kernels;

namespace {

bool close(double a, double b, double rel = 1e-12) {
    if (a == b) return true;
    if (std::isnan(a) || std::isnan(b)) return false;
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-300;
}

std::vector<double> log_uniform(std::mt19937_64& rng, std::size_t n, double lo_exp, double hi_exp) {
    std::uniform_real_distribution<double> u(lo_exp, hi_exp);
    std::vector<double> v(n);
    for (double& x : v) x = std::pow(10.0, u(rng));
    return v;
}

}  // namespace

TEST_CASE("scalar kernels: reference semantics") {
    const KernelTable& k = scalar_table();
    const double d1[] = {0.0, 1.0, 4.0, INFINITY};
    const double d2[] = {1.0, 0.0, 4.0, 1.0};
    double out[4];
    k.pgfl_complement(d1, d2, 4, 2.0, 0.0, 2.0, out);
    CHECK(out[0] == 1.0);                                      // on top of the point: g = 0
    CHECK(out[1] == doctest::Approx(2.0 / 3.0));               // 1 - 1/(1+2)
    CHECK(out[2] == doctest::Approx(1.0 - 1.0 / (1.0 + 2.0 / 16.0)));
    CHECK(out[3] == 0.0);
    k.pgfl_complement(d1, d2, 4, 0.0, 1.0, 2.0, out);
    CHECK(out[0] == doctest::Approx(0.5));
    CHECK(out[1] == 1.0);

    const double xs[] = {1.0, 0.0, 3.0};
    const double ys[] = {0.0, 2.0, 4.0};
    const double g[] = {2.0, 0.0, 1.0};
    CHECK(k.sum_power_law(xs, ys, g, 3, 0.0, 0.0, 2.0) == doctest::Approx(2.0 + 1.0 / 625.0));
    const NearestResult nr = k.nearest(xs, ys, 3, 0.1, 1.9);
    CHECK(nr.index == 1);
    CHECK(nr.dist_sq == doctest::Approx(0.02));

    double u[] = {1.0, std::exp(-2.0)};
    k.exponential_from_uniform(u, 2);
    CHECK(u[0] == 0.0);
    CHECK(u[1] == doctest::Approx(2.0));
}

TEST_CASE("dispatch honours availability") {
    const KernelTable& a = active();
    if (avx2_table() == nullptr) CHECK(a.backend == Backend::Scalar);
    CHECK(to_string(scalar_table().backend) == "scalar");
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
    const KernelTable* v = avx2_table();
    if (v == nullptr) {
        MESSAGE("AVX2 not available on this host; equivalence test skipped");
        return;
    }
    const KernelTable& s = scalar_table();
    std::mt19937_64 rng(2024);

    SUBCASE("pgfl_complement") {
        for (std::size_t n : {1u, 3u, 4u, 15u, 16u, 257u}) {
            const auto d1 = log_uniform(rng, n, -12.0, 12.0);
            const auto d2 = log_uniform(rng, n, -12.0, 12.0);
            for (double half_alpha : {1.4, 2.0, 1.0000001, 3.3}) {
                for (auto [s1, s2] : {std::pair{0.3, 7.0}, std::pair{0.0, 2.5}, std::pair{1e-6, 0.0},
                                      std::pair{1e5, 1e-3}}) {
                    std::vector<double> a(n), b(n);
                    s.pgfl_complement(d1.data(), d2.data(), n, s1, s2, half_alpha, a.data());
                    v->pgfl_complement(d1.data(), d2.data(), n, s1, s2, half_alpha, b.data());
                    for (std::size_t i = 0; i < n; ++i) {
                        CAPTURE(d1[i]);
                        CAPTURE(d2[i]);
                        CHECK(close(a[i], b[i]));
                    }
                }
            }
        }
        const double d1[] = {0.0, INFINITY, 1e-310, 1e300, 1.0};
        const double d2[] = {1.0, 0.0, 1.0, 1e-300, 1.0};
        double a[5], b[5];
        s.pgfl_complement(d1, d2, 5, 0.5, 0.25, 2.0, a);
        v->pgfl_complement(d1, d2, 5, 0.5, 0.25, 2.0, b);
        for (int i = 0; i < 5; ++i) CHECK(close(a[i], b[i]));
    }

    SUBCASE("sum_power_law") {
        std::uniform_real_distribution<double> pos(-30.0, 30.0);
        std::exponential_distribution<double> fade(1.0);
        for (std::size_t n : {0u, 1u, 5u, 64u, 3601u, 14403u}) {
            std::vector<double> xs(n), ys(n), g(n);
            for (std::size_t i = 0; i < n; ++i) {
                xs[i] = pos(rng);
                ys[i] = pos(rng);
                g[i] = fade(rng);
            }
            if (n > 2) g[1] = 0.0;
            for (double half_alpha : {1.4, 2.0}) {
                const double a = s.sum_power_law(xs.data(), ys.data(), g.data(), n, 0.3, -0.2, half_alpha);
                const double b = v->sum_power_law(xs.data(), ys.data(), g.data(), n, 0.3, -0.2, half_alpha);
                CHECK(close(a, b));
            }
        }
        // A zero gain on a point at the query location contributes nothing.
        const double xs[] = {0.0, 1.0, 2.0, 3.0, 4.0};
        const double ys[] = {0.0, 0.0, 0.0, 0.0, 0.0};
        const double g[] = {0.0, 1.0, 1.0, 1.0, 1.0};
        CHECK(close(s.sum_power_law(xs, ys, g, 5, 0.0, 0.0, 2.0), v->sum_power_law(xs, ys, g, 5, 0.0, 0.0, 2.0)));
        CHECK(std::isfinite(v->sum_power_law(xs, ys, g, 5, 0.0, 0.0, 2.0)));
    }

    SUBCASE("nearest") {
        std::uniform_real_distribution<double> pos(-30.0, 30.0);
        for (std::size_t n : {1u, 2u, 4u, 7u, 100u, 3600u, 14401u}) {
            std::vector<double> xs(n), ys(n);
            for (std::size_t i = 0; i < n; ++i) {
                xs[i] = pos(rng);
                ys[i] = pos(rng);
            }
            for (int q = 0; q < 10; ++q) {
                const double x = pos(rng), y = pos(rng);
                const NearestResult a = s.nearest(xs.data(), ys.data(), n, x, y);
                const NearestResult b = v->nearest(xs.data(), ys.data(), n, x, y);
                CHECK(a.index == b.index);
                CHECK(a.dist_sq == b.dist_sq);
            }
        }
        // Exact ties resolve to the lowest index on both paths.
        const double xs[] = {2.0, 1.0, -1.0, 1.0, 0.0, -1.0, 1.0};
        const double ys[] = {0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0};
        CHECK(s.nearest(xs, ys, 7, 0.0, 0.0).index == 1);
        CHECK(v->nearest(xs, ys, 7, 0.0, 0.0).index == 1);
    }

    SUBCASE("exponential_from_uniform") {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (std::size_t n : {1u, 4u, 9u, 1000u}) {
            std::vector<double> a(n);
            for (double& x : a) x = 1.0 - uni(rng);
            a[0] = 1.0;
            if (n > 1) a[1] = std::numeric_limits<double>::denorm_min();
            std::vector<double> b = a;
            s.exponential_from_uniform(a.data(), n);
            v->exponential_from_uniform(b.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(close(a[i], b[i]));
        }
    }
}
