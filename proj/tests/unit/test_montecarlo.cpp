#include <cmath>
#include <set>

#include "doctest.h"
#include "hetnet/analytic.hpp"
#include "hetnet/core.hpp"
#include "hetnet/error.hpp"
#include "hetnet/montecarlo.hpp"

using namespace hetnet;
using namespace hetnet::montecarlo;

namespace {

NetworkParams captioned() {
    NetworkParams p;
    p.P_m = db_to_linear(22.0);
    p.B_s = db_to_linear(22.0);
    return p;
}

SimulationSetup serial() {
    SimulationSetup s;
    s.threads = 1;
    return s;
}

bool within_sigmas(const EstimateWithCI& e, double truth, double k) {
    return std::abs(e.mean - truth) <= k * e.std_error;
}

}  // namespace

TEST_CASE("PPP sampling: counts and support") {
    const SimulationWindow w{};
    CHECK(sample_ppp(0.0, w, 7).empty());
    CHECK_THROWS_AS(sample_ppp(-1.0, w, 7), InputError);

    double sum = 0.0, sum_sq = 0.0;
    const int n = 1000;
    for (int s = 0; s < n; ++s) {
        const std::vector<Point2> pts = sample_ppp(1.0, w, static_cast<std::uint64_t>(s));
        const double c = static_cast<double>(pts.size());
        sum += c;
        sum_sq += c * c;
        for (const Point2& q : pts) {
            REQUIRE(std::abs(q.x) <= w.half_width);
            REQUIRE(std::abs(q.y) <= w.half_width);
        }
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    // Poisson(3600): the sample mean has standard error 60 / sqrt(1000).
    CHECK(std::abs(mean - 3600.0) < 4.0 * 60.0 / std::sqrt(n));
    CHECK(var == doctest::Approx(3600.0).epsilon(0.15));

    for (int s = 0; s < 5; ++s) CHECK(sample_ppp(1.0, w, static_cast<std::uint64_t>(s), true).size() == 3600);
}

TEST_CASE("PPP sampling is uniform over the window") {
    const SimulationWindow w{};
    const std::vector<Point2> pts = sample_ppp(4.0, w, 3);
    int quadrant[4] = {0, 0, 0, 0};
    for (const Point2& q : pts) ++quadrant[(q.x > 0 ? 1 : 0) + (q.y > 0 ? 2 : 0)];
    const double expected = static_cast<double>(pts.size()) / 4.0;
    for (int c : quadrant) CHECK(std::abs(c - expected) < 4.0 * std::sqrt(expected));
}

TEST_CASE("network sampling is reproducible") {
    const NetworkParams p = captioned();
    const NetworkRealization a = sample_network(p, SimulationWindow{}, 11);
    const NetworkRealization b = sample_network(p, SimulationWindow{}, 11);
    const NetworkRealization c = sample_network(p, SimulationWindow{}, 12);
    CHECK(a.macro_points == b.macro_points);
    CHECK(a.pico_points == b.pico_points);
    CHECK(a.rng_state == b.rng_state);
    CHECK(a.pico_points != c.pico_points);
}

TEST_CASE("trial seeds are distinct") {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 10000; ++i) seeds.insert(trial_seed(42, i));
    CHECK(seeds.size() == 10000);
    CHECK(trial_seed(42, 0) != trial_seed(43, 0));
}

TEST_CASE("user evaluation on hand-built realizations") {
    NetworkParams p = captioned();
    SimulationWindow w;
    w.far_field_mean = false;

    NetworkRealization net;
    net.macro_points = {{4.0, 0.0}};
    SUBCASE("lone macro, no picos: macro association without interference") {
        const UserRecord u = evaluate_user(net, p, DuplexMode::IBFD, 1, w);
        CHECK(u.associated_tier == Tier::Macro);
        CHECK(u.sir_um == kSirCap);
        CHECK(u.serving_distance == doctest::Approx(4.0));
    }
    SUBCASE("nearby pico takes the user; strong self-interference kills the backhaul") {
        net.pico_points = {{0.1, 0.0}};
        p.beta = 1e30;
        const UserRecord ib = evaluate_user(net, p, DuplexMode::IBFD, 1, w);
        CHECK(ib.associated_tier == Tier::Pico);
        CHECK(ib.serving_distance == doctest::Approx(0.1));
        CHECK(ib.sir_sm < 1e-20);
        // FDD carries no self-interference: the lone backhaul link is clean.
        const UserRecord fd = evaluate_user(net, p, DuplexMode::FDD, 1, w);
        CHECK(fd.sir_sm == kSirCap);
        CHECK(fd.sir_us == kSirCap);
    }
    SUBCASE("bias decides between equidistant stations") {
        net.pico_points = {{-4.0, 0.0}};
        p.B_s = 1.0;
        CHECK(evaluate_user(net, p, DuplexMode::FDD, 1, w).associated_tier == Tier::Macro);
        p.B_s = 1e3;
        CHECK(evaluate_user(net, p, DuplexMode::FDD, 1, w).associated_tier == Tier::Pico);
    }
    SUBCASE("no macro station") {
        net.macro_points.clear();
        net.pico_points = {{1.0, 0.0}};
        CHECK_THROWS_WITH_AS(evaluate_user(net, p, DuplexMode::IBFD, 1, w), "no station in tier", InputError);
    }
}

TEST_CASE("proportion estimates") {
    const EstimateWithCI one = proportion_estimate(1, 1);
    CHECK(one.mean == 1.0);
    CHECK(one.n_trials == 1);
    CHECK(one.ci95_low <= one.mean);
    CHECK(one.ci95_high >= one.mean);
    const EstimateWithCI half = proportion_estimate(500, 1000);
    CHECK(half.std_error == doctest::Approx(std::sqrt(0.25 / 1000)).epsilon(1e-12));
    CHECK(half.ci95_high - half.ci95_low == doctest::Approx(2 * 1.96 * half.std_error).epsilon(1e-9));
    CHECK_THROWS_AS(proportion_estimate(0, 0), InputError);
}

TEST_CASE("coverage estimates do not depend on the thread count") {
    const NetworkParams p = captioned();
    const Thresholds th{0.1, 0.1, 0.1};
    SimulationSetup many = serial();
    many.threads = 4;
    const CoverageEstimate a = estimate_coverage_breakdown(p, th, DuplexMode::IBFD, 400, serial(), 5);
    const CoverageEstimate b = estimate_coverage_breakdown(p, th, DuplexMode::IBFD, 400, many, 5);
    CHECK(a.total.mean == b.total.mean);
    CHECK(a.smallcell_joint.mean == b.smallcell_joint.mean);
    CHECK(a.pico_association.mean == b.pico_association.mean);
    const RateEstimate ra = estimate_rate_breakdown(p, th, DuplexMode::FDD, 400, serial(), 5);
    const RateEstimate rb = estimate_rate_breakdown(p, th, DuplexMode::FDD, 400, many, 5);
    CHECK(ra.covered_rate.mean == rb.covered_rate.mean);
    CHECK(ra.covered_rate.std_error == rb.covered_rate.std_error);
}

TEST_CASE("trial counter") {
    const std::uint64_t before = trials_simulated();
    estimate_coverage(captioned(), Thresholds{}, DuplexMode::FDD, 50, serial(), 1);
    CHECK(trials_simulated() - before == 50);
}

TEST_CASE("simulated association and coverage agree with the analytic model") {
    const NetworkParams p = captioned();
    const Thresholds th{0.1, 0.1, 0.1};
    const CoverageEstimate e = estimate_coverage_breakdown(p, th, DuplexMode::FDD, 4000, SimulationSetup{}, 99);
    const analytic::CoverageBreakdown a = analytic::coverage_total(p, th, DuplexMode::FDD, {}, false);
    CHECK(within_sigmas(e.pico_association, a.p_assoc_s, 3.0));
    CHECK(within_sigmas(e.total, a.p_total, 3.0));
    CHECK(within_sigmas(e.macro_joint, a.p_macro_joint, 3.0));
}

TEST_CASE("simulated covered rate is consistent with its addends") {
    const RateEstimate r =
        estimate_rate_breakdown(captioned(), Thresholds{}, DuplexMode::FDD, 2000, SimulationSetup{}, 4);
    CHECK(r.covered_rate.mean ==
          doctest::Approx((r.macro_term.mean + r.smallcell_term.mean) / r.coverage.mean).epsilon(1e-12));
    CHECK(r.covered_rate.std_error > 0.0);
}

TEST_CASE("empty conditioning event") {
    const Thresholds impossible{1e300, 1e300, 1e300};
    CHECK_THROWS_WITH_AS(estimate_rate(captioned(), impossible, DuplexMode::FDD, 20, serial(), 1),
                         "conditioning event empty in sample", NumericalError);
}

TEST_CASE("window size has no visible edge effect") {
    NetworkParams p = captioned();
    p.lambda_s = 1.0;
    const Thresholds th{0.1, 0.1, 0.1};
    SimulationSetup small{}, large{};
    large.window.half_width = 60.0;
    const EstimateWithCI a = estimate_coverage(p, th, DuplexMode::IBFD, 3000, small, 8);
    const EstimateWithCI b = estimate_coverage(p, th, DuplexMode::IBFD, 3000, large, 9);
    const double se = std::hypot(a.std_error, b.std_error);
    CHECK(std::abs(a.mean - b.mean) <= 3.0 * se);
}

TEST_CASE("invalid simulation inputs") {
    SimulationSetup bad{};
    bad.window.half_width = 0.0;
    CHECK_THROWS_AS(estimate_coverage(captioned(), Thresholds{}, DuplexMode::IBFD, 10, bad, 1), InputError);
    CHECK_THROWS_AS(estimate_coverage(captioned(), Thresholds{}, DuplexMode::IBFD, 0, SimulationSetup{}, 1),
                    InputError);
}
