#pragma once

// Brute-force simulation of the two-tier network: PPP realizations in a
// square window around a typical user at the origin, Rayleigh fading drawn
// per link, SIRs evaluated from the explicit interferer sets.

#include <cstdint>
#include <vector>

#include "hetnet/core.hpp"

namespace hetnet::montecarlo {

/// Stand-in for the SIR of a link that sees no interference at all.
inline constexpr double kSirCap = 1e12;

struct SimulationWindow {
    /// The window is [-half_width, half_width]^2.
    double half_width = 30.0;
    /// Measure distances on the torus instead of the plane.
    bool wrap = false;
    /// Add the mean interference of the stations outside the window (planar
    /// windows only). Its fluctuation is negligible at window scale, while
    /// dropping it biases coverage upwards for path-loss exponents near 2.
    bool far_field_mean = true;

    void validate() const;
    [[nodiscard]] double area() const { return 4.0 * half_width * half_width; }
};

struct NetworkRealization {
    std::vector<Point2> macro_points;
    std::vector<Point2> pico_points;
    /// Seed of the fading draws that belong to this realization.
    std::uint64_t rng_state = 0;
};

struct EstimateWithCI {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_trials = 0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

/// Poisson(intensity * area) points, i.i.d. uniform in the window; with
/// `fixed_count` the count is the rounded mean instead (a binomial process).
std::vector<Point2> sample_ppp(double intensity, const SimulationWindow& window, std::uint64_t seed,
                               bool fixed_count = false);

NetworkRealization sample_network(const NetworkParams& p, const SimulationWindow& window, std::uint64_t seed,
                                  bool fixed_count = false);

enum class Tier { Macro, Pico };

struct UserRecord {
    Tier associated_tier = Tier::Macro;
    /// Only the SIRs of the associated tier are set; the others stay 0.
    double sir_us = 0.0;
    double sir_sm = 0.0;
    double sir_um = 0.0;
    /// Distance from the user to its serving station.
    double serving_distance = 0.0;
};

/// Associate the user at the origin by biased received power and evaluate
/// the SIRs of its links with fading drawn from `seed`. Throws InputError
/// "no station in tier" when the realization holds no macro station.
UserRecord evaluate_user(const NetworkRealization& realization, const NetworkParams& p, DuplexMode mode,
                         std::uint64_t seed, const SimulationWindow& window = {});

struct SimulationSetup {
    SimulationWindow window{};
    bool fixed_count = false;
    /// Worker threads; 0 means one per hardware thread.
    unsigned threads = 0;
};

/// Bernoulli mean with its normal-approximation interval.
EstimateWithCI proportion_estimate(std::uint64_t successes, std::uint64_t n);

struct CoverageEstimate {
    EstimateWithCI total;
    EstimateWithCI smallcell_joint;
    EstimateWithCI macro_joint;
    EstimateWithCI pico_association;
};

CoverageEstimate estimate_coverage_breakdown(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                                             std::uint64_t n_trials, const SimulationSetup& setup,
                                             std::uint64_t master_seed);

/// Fraction of trials in the coverage event.
EstimateWithCI estimate_coverage(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                                 std::uint64_t n_trials, const SimulationSetup& setup, std::uint64_t master_seed);

struct RateEstimate {
    /// Covered rate: sum of per-trial rates over covered trials / covered trials.
    EstimateWithCI covered_rate;
    /// Per-trial means of rate x coverage indicator, split by tier; they
    /// estimate the unnormalised rate addends.
    EstimateWithCI macro_term;
    EstimateWithCI smallcell_term;
    EstimateWithCI coverage;
};

/// Throws NumericalError "conditioning event empty in sample" when no trial
/// is covered.
RateEstimate estimate_rate_breakdown(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                                     std::uint64_t n_trials, const SimulationSetup& setup, std::uint64_t master_seed);

EstimateWithCI estimate_rate(const NetworkParams& p, const Thresholds& th, DuplexMode mode, std::uint64_t n_trials,
                             const SimulationSetup& setup, std::uint64_t master_seed);

/// Number of simulated user drops since program start (instrumentation).
std::uint64_t trials_simulated();

/// Seed of trial `index` under `master_seed`; independent of scheduling.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace hetnet::montecarlo
