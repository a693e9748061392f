#include <cmath>

#include "cli/config.hpp"
#include "doctest.h"
#include "hetnet/error.hpp"
#include "hetnet/experiments.hpp"

using namespace hetnet;
using namespace hetnet::experiments;

namespace {

const Metric& find(const SweepRow& row, const std::string& name) {
    for (const Metric& m : row.metrics)
        if (m.name == name) return m;
    FAIL("missing metric " << name);
    return row.metrics.front();
}

}  // namespace

TEST_CASE("sweep spec validation") {
    SweepSpec s;
    CHECK_THROWS_WITH_AS(s.validate(), "grid non-empty", InputError);
    s.grid = {3.0, 1.0};
    CHECK_THROWS_AS(s.validate(), InputError);
    s.grid = {1.0, 3.0};
    s.modes.clear();
    CHECK_THROWS_AS(s.validate(), InputError);
    CHECK_THROWS_AS(run_sweep(SweepSpec{}), InputError);
}

TEST_CASE("figure presets") {
    for (const std::string& id : figure_ids()) {
        const SweepSpec s = figure_preset(id);
        CHECK(s.name == id);
        CHECK_NOTHROW(s.validate());
    }
    CHECK_THROWS_AS(figure_preset("fig99"), InputError);

    const SweepSpec fig7 = figure_preset("fig7");
    CHECK(fig7.grid.size() == 20);
    CHECK(fig7.grid.front() == 1.0);
    CHECK(fig7.grid.back() == 20.0);
    CHECK(fig7.base_params.P_m == doctest::Approx(db_to_linear(22.0)).epsilon(1e-15));

    const SweepSpec fig14 = figure_preset("fig14");
    REQUIRE(fig14.grid.size() == 7);
    CHECK(fig14.grid[3] == doctest::Approx(0.451).epsilon(1e-12));
    CHECK(fig14.grid.back() == doctest::Approx(0.901).epsilon(1e-12));

    const SweepSpec fig8 = figure_preset("fig8");
    CHECK(fig8.grid.front() == doctest::Approx(-10.0).epsilon(1e-12));
    CHECK(fig8.notes.size() == 1);
    CHECK(figure_preset("fig6").mc_trials == 0);
}

TEST_CASE("grid points set the swept parameter only") {
    SweepSpec s = figure_preset("fig11");
    const SweepPoint pt = apply(s, 40.0);
    CHECK(pt.params.B_s == doctest::Approx(1e4).epsilon(1e-12));
    CHECK(pt.params.lambda_s == s.base_params.lambda_s);
    s.swept_parameter = SweptParameter::LambdaRatio;
    CHECK(apply(s, 7.0).params.lambda_s == 7.0 * s.base_params.lambda_m);
    s.swept_parameter = SweptParameter::Eta;
    CHECK_THROWS_AS(apply(s, 1.5), InputError);
}

TEST_CASE("analytic-only sweep runs no simulation") {
    SweepSpec s = figure_preset("fig9");
    s.mc_trials = 0;
    s.grid = {-10.0, 0.0};
    s.modes = {DuplexMode::FDD};
    const std::uint64_t before = montecarlo::trials_simulated();
    const std::vector<SweepRow> rows = run_sweep(s, 2);
    CHECK(montecarlo::trials_simulated() == before);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].x == -10.0);
    CHECK(rows[1].x == 0.0);
    CHECK(!find(rows[0], "p_total").mc.has_value());
    CHECK(find(rows[0], "p_total").analytic > find(rows[1], "p_total").analytic);
}

TEST_CASE("sweep rows are ordered by grid point then mode") {
    SweepSpec s = figure_preset("fig9b");
    s.grid = {1.0, 2.0};
    s.mc_trials = 200;
    const std::uint64_t before = montecarlo::trials_simulated();
    const std::vector<SweepRow> rows = run_sweep(s, 3);
    CHECK(montecarlo::trials_simulated() - before == 4 * 200);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].mode == DuplexMode::IBFD);
    CHECK(rows[1].mode == DuplexMode::FDD);
    CHECK(rows[2].x == 2.0);
    const Metric& m = find(rows[3], "p_total");
    REQUIRE(m.mc.has_value());
    CHECK(m.mc->n_trials == 200);

    // Same seed, different worker count: identical simulated values.
    const std::vector<SweepRow> again = run_sweep(s, 1);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(find(rows[i], "p_total").mc->mean == find(again[i], "p_total").mc->mean);
}

TEST_CASE("failing points do not stop the sweep") {
    SweepSpec s = figure_preset("fig11b");
    s.mc_trials = 0;
    s.modes = {DuplexMode::FDD};
    s.grid = {1.5, 4.0};  // alpha_s must exceed 2
    const std::vector<SweepRow> rows = run_sweep(s);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].error_kind == PointError::Input);
    CHECK(rows[1].error_kind == PointError::None);
    CHECK(rows[1].metrics.size() == 1);
}

TEST_CASE("rate metrics: shares add up to the covered rate") {
    SweepSpec s = figure_preset("fig14");
    s.mc_trials = 0;
    s.modes = {DuplexMode::FDD};
    s.grid = {0.451};
    const std::vector<SweepRow> rows = run_sweep(s);
    const SweepRow& r = rows.front();
    const double total = find(r, "rate_total").analytic;
    CHECK(find(r, "rate_macro_share").analytic + find(r, "rate_smallcell_share").analytic ==
          doctest::Approx(total).epsilon(1e-12));
    CHECK(find(r, "rate_macro_term").analytic + find(r, "rate_smallcell_term").analytic ==
          doctest::Approx(total * find(r, "coverage_used").analytic).epsilon(1e-12));
}

TEST_CASE("topology metrics") {
    SweepSpec s = figure_preset("fig6");
    s.grid = {22.0};
    const std::vector<SweepRow> rows = run_sweep(s);
    const SweepRow& r = rows.front();
    CHECK(find(r, "p_A").analytic + find(r, "p_B").analytic + find(r, "p_C").analytic ==
          doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("preset survives a config round trip") {
    for (const std::string& id : {"fig8", "fig12", "fig14"}) {
        const SweepSpec s = figure_preset(id);
        const cli::RunConfig back = cli::parse_config(cli::to_config_text(s));
        CHECK(back.has_sweep);
        const SweepSpec& t = back.spec;
        CHECK(t.name == s.name);
        CHECK(t.base_params == s.base_params);
        CHECK(t.base_thresholds == s.base_thresholds);
        CHECK(t.grid == s.grid);
        CHECK(t.modes == s.modes);
        CHECK(t.outputs == s.outputs);
        CHECK(t.swept_parameter == s.swept_parameter);
        CHECK(t.mc_trials == s.mc_trials);
        CHECK(t.master_seed == s.master_seed);
        CHECK(t.notes == s.notes);
        CHECK(t.analytic.quad.rel_tol == s.analytic.quad.rel_tol);
        CHECK(t.simulation.window.half_width == s.simulation.window.half_width);
        CHECK(cli::to_config_text(t) == cli::to_config_text(s));
    }
}
