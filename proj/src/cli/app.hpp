#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hetnet/experiments.hpp"

namespace hetnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumerical = 2;

inline constexpr const char* kCsvHeader =
    "x,mode,metric,analytic,mc_mean,mc_ci95_low,mc_ci95_high,n_trials,quad_error";

/// Shortest representation that parses back to the same double.
std::string format_number(double v);

/// CSV table of sweep rows; rows of failed points are skipped.
void write_csv(std::ostream& out, const std::vector<experiments::SweepRow>& rows);

/// Exit code for a finished sweep: 1 if any point had invalid input, 2 if any
/// failed numerically or did not converge, 0 otherwise.
int exit_code(const std::vector<experiments::SweepRow>& rows);

/// Entry point; CSV goes to `out` (unless --out is given), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hetnet::cli
