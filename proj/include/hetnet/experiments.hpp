#pragma once

// Figure presets and parameter sweeps comparing analytic values with
// simulation estimates.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetnet/analytic.hpp"
#include "hetnet/core.hpp"
#include "hetnet/montecarlo.hpp"

namespace hetnet::experiments {

/// Swept quantity, in the units of the x column: dB for B_s, T_s and beta,
/// plain numbers for the density ratio lambda_s/lambda_m, eta and alpha_s.
enum class SweptParameter { B_s, T_s, LambdaRatio, Eta, Beta, AlphaS };

std::string_view to_string(SweptParameter s);
SweptParameter swept_parameter_from_string(std::string_view name);

enum class Output { CoverageTotal, CoverageBreakdown, Topology, Rate };

std::string_view to_string(Output o);
Output output_from_string(std::string_view name);

struct SweepSpec {
    std::string name;
    SweptParameter swept_parameter = SweptParameter::B_s;
    std::vector<double> grid;
    NetworkParams base_params{};
    Thresholds base_thresholds{};
    std::vector<DuplexMode> modes{DuplexMode::IBFD};
    std::vector<Output> outputs{Output::CoverageTotal};
    /// 0 disables simulation.
    std::uint64_t mc_trials = 0;
    std::uint64_t master_seed = 1;
    montecarlo::SimulationSetup simulation{};
    analytic::AnalyticOptions analytic{};
    /// Caveats to print alongside the table.
    std::vector<std::string> notes;

    /// Throws InputError for an empty or unsorted grid or empty sets.
    void validate() const;
};

/// Parameters and thresholds of one grid point.
struct SweepPoint {
    NetworkParams params;
    Thresholds thresholds;
};

SweepPoint apply(const SweepSpec& spec, double x);

struct Metric {
    std::string name;
    double analytic = 0.0;
    double quad_error = 0.0;
    std::optional<montecarlo::EstimateWithCI> mc;
};

enum class PointError { None, Input, Numerical };

struct SweepRow {
    double x = 0.0;
    DuplexMode mode = DuplexMode::IBFD;
    std::vector<Metric> metrics;
    bool converged = true;
    /// Set when the point failed; the sweep carries on regardless.
    PointError error_kind = PointError::None;
    std::string error;
};

/// One row per grid point per mode, ordered by grid index then mode.
/// `threads` caps the number of points evaluated at once (0 = hardware).
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads = 1);

/// Figure ids: fig6 .. fig14, plus fig9b, fig10b and fig11b for the second
/// panel of the paired figures.
std::vector<std::string> figure_ids();
SweepSpec figure_preset(std::string_view id);

}  // namespace hetnet::experiments
