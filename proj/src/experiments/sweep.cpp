#include <algorithm>
#include <array>
#include <atomic>
#include <thread>

#include "hetnet/error.hpp"
#include "hetnet/experiments.hpp"

namespace hetnet::experiments {

namespace {

constexpr std::array<std::pair<SweptParameter, std::string_view>, 6> kSwept{{
    {SweptParameter::B_s, "B_s"},
    {SweptParameter::T_s, "T_s"},
    {SweptParameter::LambdaRatio, "lambda_ratio"},
    {SweptParameter::Eta, "eta"},
    {SweptParameter::Beta, "beta"},
    {SweptParameter::AlphaS, "alpha_s"},
}};

constexpr std::array<std::pair<Output, std::string_view>, 4> kOutputs{{
    {Output::CoverageTotal, "coverage_total"},
    {Output::CoverageBreakdown, "coverage_breakdown"},
    {Output::Topology, "topology"},
    {Output::Rate, "rate"},
}};

Metric metric(std::string name, double value, double error,
              std::optional<montecarlo::EstimateWithCI> mc = std::nullopt) {
    return Metric{std::move(name), value, error, mc};
}

void coverage_metrics(const SweepSpec& spec, const SweepPoint& pt, DuplexMode mode, bool breakdown, SweepRow& row) {
    const analytic::CoverageBreakdown cov =
        analytic::coverage_total(pt.params, pt.thresholds, mode, spec.analytic, breakdown);
    row.converged = row.converged && cov.converged;
    std::optional<montecarlo::CoverageEstimate> mc;
    if (spec.mc_trials > 0)
        mc = montecarlo::estimate_coverage_breakdown(pt.params, pt.thresholds, mode, spec.mc_trials, spec.simulation,
                                                     spec.master_seed);
    auto est = [&](auto member) -> std::optional<montecarlo::EstimateWithCI> {
        if (!mc) return std::nullopt;
        return (*mc).*member;
    };
    row.metrics.push_back(metric("p_total", cov.p_total, cov.error_estimate, est(&montecarlo::CoverageEstimate::total)));
    if (!breakdown) return;
    row.metrics.push_back(metric("p_smallcell_joint", cov.p_smallcell_joint, cov.error_estimate,
                                 est(&montecarlo::CoverageEstimate::smallcell_joint)));
    row.metrics.push_back(metric("p_macro_joint", cov.p_macro_joint, cov.error_estimate,
                                 est(&montecarlo::CoverageEstimate::macro_joint)));
    row.metrics.push_back(
        metric("p_assoc_s", cov.p_assoc_s, 0.0, est(&montecarlo::CoverageEstimate::pico_association)));
    row.metrics.push_back(metric("backhaul_conditional", cov.backhaul_conditional, 0.0));
    row.metrics.push_back(metric("access_conditional", cov.access_conditional, 0.0));
}

void topology_metrics(const SweepSpec& spec, const SweepPoint& pt, SweepRow& row) {
    const analytic::TopologyProbabilities t = analytic::topology_probabilities(pt.params, spec.analytic);
    row.converged = row.converged && t.converged;
    row.metrics.push_back(metric("p_A", t.p_A, t.error_estimate));
    row.metrics.push_back(metric("p_B", t.p_B, t.error_estimate));
    row.metrics.push_back(metric("p_C", t.p_C, t.error_estimate));
    row.metrics.push_back(metric("topology_total", t.total, t.error_estimate));
}

void rate_metrics(const SweepSpec& spec, const SweepPoint& pt, DuplexMode mode, SweepRow& row) {
    const analytic::RateBreakdown r = analytic::rate_covered(pt.params, pt.thresholds, mode, spec.analytic);
    row.converged = row.converged && r.converged;
    std::optional<montecarlo::RateEstimate> mc;
    if (spec.mc_trials > 0)
        mc = montecarlo::estimate_rate_breakdown(pt.params, pt.thresholds, mode, spec.mc_trials, spec.simulation,
                                                 spec.master_seed);
    auto est = [&](auto member) -> std::optional<montecarlo::EstimateWithCI> {
        if (!mc) return std::nullopt;
        return (*mc).*member;
    };
    row.metrics.push_back(
        metric("rate_total", r.rate_total, r.error_estimate, est(&montecarlo::RateEstimate::covered_rate)));
    row.metrics.push_back(metric("rate_macro_share", r.macro_share(), r.error_estimate));
    row.metrics.push_back(metric("rate_smallcell_share", r.smallcell_share(), r.error_estimate));
    row.metrics.push_back(
        metric("rate_macro_term", r.rate_macro_term, r.error_estimate, est(&montecarlo::RateEstimate::macro_term)));
    row.metrics.push_back(metric("rate_smallcell_term", r.rate_smallcell_term, r.error_estimate,
                                 est(&montecarlo::RateEstimate::smallcell_term)));
    row.metrics.push_back(
        metric("coverage_used", r.coverage_used, r.error_estimate, est(&montecarlo::RateEstimate::coverage)));
}

SweepRow evaluate(const SweepSpec& spec, double x, DuplexMode mode) {
    SweepRow row;
    row.x = x;
    row.mode = mode;
    try {
        const SweepPoint pt = apply(spec, x);
        for (Output o : spec.outputs) {
            switch (o) {
                case Output::CoverageTotal: coverage_metrics(spec, pt, mode, false, row); break;
                case Output::CoverageBreakdown: coverage_metrics(spec, pt, mode, true, row); break;
                case Output::Topology: topology_metrics(spec, pt, row); break;
                case Output::Rate: rate_metrics(spec, pt, mode, row); break;
            }
        }
    } catch (const InputError& e) {
        row.error_kind = PointError::Input;
        row.error = e.what();
    } catch (const std::exception& e) {
        row.error_kind = PointError::Numerical;
        row.error = e.what();
        row.converged = false;
    }
    return row;
}

}  // namespace

std::string_view to_string(SweptParameter s) {
    for (const auto& [k, v] : kSwept)
        if (k == s) return v;
    return "?";
}

SweptParameter swept_parameter_from_string(std::string_view name) {
    for (const auto& [k, v] : kSwept)
        if (v == name) return k;
    throw InputError("unknown swept parameter '" + std::string(name) + "'");
}

std::string_view to_string(Output o) {
    for (const auto& [k, v] : kOutputs)
        if (k == o) return v;
    return "?";
}

Output output_from_string(std::string_view name) {
    for (const auto& [k, v] : kOutputs)
        if (v == name) return k;
    throw InputError("unknown output '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
    if (grid.empty()) throw InputError("grid non-empty");
    if (!std::is_sorted(grid.begin(), grid.end())) throw InputError("grid must be sorted");
    if (modes.empty()) throw InputError("at least one mode is required");
    if (outputs.empty()) throw InputError("at least one output is required");
    base_params.validate();
    base_thresholds.validate();
    analytic.quad.validate();
    if (mc_trials > 0) simulation.window.validate();
}

SweepPoint apply(const SweepSpec& spec, double x) {
    SweepPoint pt{spec.base_params, spec.base_thresholds};
    switch (spec.swept_parameter) {
        case SweptParameter::B_s: pt.params.B_s = db_to_linear(x); break;
        case SweptParameter::T_s: pt.thresholds.T_s = db_to_linear(x); break;
        case SweptParameter::LambdaRatio: pt.params.lambda_s = x * pt.params.lambda_m; break;
        case SweptParameter::Eta: pt.params.eta = x; break;
        case SweptParameter::Beta: pt.params.beta = db_to_linear(x); break;
        case SweptParameter::AlphaS: pt.params.alpha_s = x; break;
    }
    pt.params.validate();
    pt.thresholds.validate();
    return pt;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads) {
    spec.validate();
    const std::size_t n_modes = spec.modes.size();
    const std::size_t n = spec.grid.size() * n_modes;
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

    // With several points in flight the simulator of each runs single-threaded;
    // its results do not depend on the thread count either way.
    SweepSpec local = spec;
    local.simulation.threads = workers > 1 ? 1 : spec.simulation.threads;

    std::vector<SweepRow> rows(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
            rows[i] = evaluate(local, spec.grid[i / n_modes], spec.modes[i % n_modes]);
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    pool.clear();
    return rows;
}

}  // namespace hetnet::experiments
