#include "cli/app.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "cli/config.hpp"
#include "hetnet/error.hpp"

namespace hetnet::cli {

namespace {

using experiments::Output;
using experiments::SweepRow;
using experiments::SweepSpec;
using experiments::SweptParameter;

constexpr std::uint64_t kDefaultSimulateTrials = 20000;
constexpr std::uint64_t kDefaultValidateTrials = 5000;
/// Allowed deviation of a simulated proportion, in standard errors; wide
/// enough that a suite of a few dozen comparisons rarely trips by chance.
constexpr double kValidateSigmas = 4.0;

struct Options {
    std::string config;
    std::vector<std::string> params;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    std::uint64_t mc_trials = 0;
    std::string out;
    bool fixed_count = false;
    std::vector<std::string> modes;
    bool with_rate = false;
    std::string figure;

    // One of each per subcommand; only the parsed subcommand's can be set.
    std::vector<CLI::Option*> threads_opt, seed_opt, trials_opt;
};

bool given(const std::vector<CLI::Option*>& opts) {
    for (const CLI::Option* opt : opts)
        if (opt->count() > 0) return true;
    return false;
}

void add_common(CLI::App& sub, Options& o, bool config_required = false) {
    auto* c = sub.add_option("--config", o.config, "JSON config file (flat key/value, `_db` keys for decibels)");
    if (config_required) c->required();
    sub.add_option("--param", o.params, "Override one config key: key=value (repeatable)");
    o.threads_opt.push_back(sub.add_option("--threads", o.threads, "Worker thread cap (fallback: HETNET_THREADS)"));
    o.seed_opt.push_back(sub.add_option("--seed", o.seed, "Master seed of the simulation"));
    o.trials_opt.push_back(sub.add_option("--mc-trials", o.mc_trials, "Simulated user drops per point (0 disables)"));
    sub.add_option("--out", o.out, "Write the CSV here instead of stdout");
    sub.add_flag("--fixed-count,--full-scale", o.fixed_count,
                 "Fixed station counts (rounded means) instead of Poisson counts");
    sub.add_option("--mode", o.modes, "Duplex mode(s): IBFD, FDD");
}

unsigned thread_cap(const Options& o) {
    if (given(o.threads_opt)) return o.threads;
    const char* env = std::getenv("HETNET_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    unsigned v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc() || ptr != end) throw InputError("HETNET_THREADS must be a non-negative integer");
    return v;
}

/// Current value of the swept parameter, in the units of the x column.
double current_x(const SweepSpec& s) {
    const NetworkParams& p = s.base_params;
    switch (s.swept_parameter) {
        case SweptParameter::B_s: return linear_to_db(p.B_s);
        case SweptParameter::T_s: return linear_to_db(s.base_thresholds.T_s);
        case SweptParameter::LambdaRatio: return p.lambda_s / p.lambda_m;
        case SweptParameter::Eta: return p.eta;
        case SweptParameter::Beta: return linear_to_db(p.beta);
        case SweptParameter::AlphaS: return p.alpha_s;
    }
    return 0.0;
}

/// --param overrides and explicit flags, on top of a config or preset.
void apply_flags(RunConfig& cfg, const Options& o) {
    apply_overrides(cfg, o.params);
    if (given(o.seed_opt)) cfg.spec.master_seed = o.seed;
    if (given(o.trials_opt)) cfg.spec.mc_trials = o.mc_trials;
    if (o.fixed_count) cfg.spec.simulation.fixed_count = true;
    if (!o.modes.empty()) {
        cfg.spec.modes.clear();
        for (const std::string& m : o.modes) cfg.spec.modes.push_back(duplex_mode_from_string(m));
    }
    if (!o.out.empty()) cfg.out = o.out;
}

/// Evaluate the configured base point only.
void single_point(SweepSpec& s) {
    s.grid = {current_x(s)};
}

void print_notes(const SweepSpec& s, std::ostream& err) {
    for (const std::string& n : s.notes) err << "note: " << n << '\n';
}

void report_failures(const std::vector<SweepRow>& rows, std::ostream& err) {
    for (const SweepRow& r : rows) {
        const std::string where = "x=" + format_number(r.x) + " mode=" + std::string(to_string(r.mode));
        if (r.error_kind != experiments::PointError::None)
            err << "error at " << where << ": " << r.error << '\n';
        else if (!r.converged)
            err << "warning: quadrature did not reach tolerance at " << where << '\n';
    }
}

template <class Body>
void emit(const RunConfig& cfg, std::ostream& out, Body&& body) {
    if (!cfg.out) {
        body(out);
        return;
    }
    std::ofstream file(*cfg.out);
    if (!file) throw InputError(*cfg.out + ": cannot open output file");
    body(file);
}

int run_rows(const RunConfig& cfg, unsigned threads, std::ostream& out, std::ostream& err) {
    print_notes(cfg.spec, err);
    const std::vector<SweepRow> rows = experiments::run_sweep(cfg.spec, threads);
    emit(cfg, out, [&](std::ostream& o) { write_csv(o, rows); });
    report_failures(rows, err);
    return exit_code(rows);
}

/// Analytic-vs-simulation agreement plus additivity of the breakdown.
int run_validate(RunConfig cfg, unsigned threads, bool trials_given, std::ostream& out, std::ostream& err) {
    SweepSpec& s = cfg.spec;
    s.swept_parameter = SweptParameter::LambdaRatio;
    s.grid = {1.0, 4.0};
    if (s.modes.size() == 1 && s.modes.front() == DuplexMode::IBFD) s.modes = {DuplexMode::IBFD, DuplexMode::FDD};
    s.outputs = {Output::CoverageBreakdown};
    if (!trials_given) s.mc_trials = kDefaultValidateTrials;
    if (s.mc_trials == 0) throw InputError("validate needs --mc-trials > 0");

    const std::vector<SweepRow> rows = experiments::run_sweep(s, threads);
    emit(cfg, out, [&](std::ostream& o) { write_csv(o, rows); });
    report_failures(rows, err);

    int failures = 0;
    auto verdict = [&](bool ok, const std::string& line) {
        err << (ok ? "PASS " : "FAIL ") << line << '\n';
        failures += ok ? 0 : 1;
    };
    for (const SweepRow& r : rows) {
        const std::string where = "x=" + format_number(r.x) + " mode=" + std::string(to_string(r.mode));
        double total = 0.0, parts = 0.0, quad = 0.0;
        for (const experiments::Metric& m : r.metrics) {
            if (m.name == "p_total") total = m.analytic, quad = m.quad_error;
            if (m.name == "p_smallcell_joint" || m.name == "p_macro_joint") parts += m.analytic;
            if (!m.mc) continue;
            const double dev = std::abs(m.mc->mean - m.analytic);
            const double se = m.mc->std_error > 0.0 ? m.mc->std_error : 1.0 / static_cast<double>(m.mc->n_trials);
            const double tol = kValidateSigmas * se + m.quad_error;
            verdict(dev <= tol, where + " " + m.name + ": analytic " + format_number(m.analytic) + " simulated " +
                                    format_number(m.mc->mean) + " +- " + format_number(m.mc->std_error));
        }
        if (!r.metrics.empty())
            verdict(std::abs(total - parts) <= 1e-12 + 2.0 * quad,
                    where + " p_total = p_smallcell_joint + p_macro_joint");
    }
    const int code = exit_code(rows);
    if (code != kExitOk) return code;
    return failures == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        if (r.error_kind != experiments::PointError::None) continue;
        for (const experiments::Metric& m : r.metrics) {
            out << format_number(r.x) << ',' << to_string(r.mode) << ',' << m.name << ',' << format_number(m.analytic)
                << ',';
            if (m.mc)
                out << format_number(m.mc->mean) << ',' << format_number(m.mc->ci95_low) << ','
                    << format_number(m.mc->ci95_high) << ',' << m.mc->n_trials;
            else
                out << ",,,";
            out << ',' << format_number(m.quad_error) << '\n';
        }
    }
}

int exit_code(const std::vector<SweepRow>& rows) {
    int code = kExitOk;
    for (const SweepRow& r : rows) {
        if (r.error_kind == experiments::PointError::Input) return kExitInput;
        if (r.error_kind == experiments::PointError::Numerical || !r.converged) code = kExitNumerical;
    }
    return code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coverage and rate of a two-tier HetNet with self-backhauled small cells"};
    app.require_subcommand(1);
    Options o;

    auto* coverage = app.add_subcommand("coverage", "Analytic coverage breakdown at one point");
    add_common(*coverage, o);
    auto* rate = app.add_subcommand("rate", "Analytic covered rate at one point");
    add_common(*rate, o);
    auto* simulate = app.add_subcommand("simulate", "Simulated coverage (and rate) at one point, with analytic values");
    add_common(*simulate, o);
    simulate->add_flag("--rate", o.with_rate, "Also estimate the covered rate");
    auto* sweep = app.add_subcommand("sweep", "Run the sweep defined by a config file");
    add_common(*sweep, o, true);
    auto* figure = app.add_subcommand("figure", "Run a figure preset");
    add_common(*figure, o);
    figure->add_option("id", o.figure, "Figure id")->required();
    auto* validate = app.add_subcommand("validate", "Check analytic values against simulation");
    add_common(*validate, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitInput;
    }

    try {
        const unsigned threads = thread_cap(o);
        if (figure->parsed()) {
            RunConfig cfg;
            cfg.spec = experiments::figure_preset(o.figure);
            cfg.has_sweep = true;
            if (!o.config.empty()) throw InputError("figure takes --param overrides, not --config");
            apply_flags(cfg, o);
            cfg.spec.simulation.threads = threads;
            return run_rows(cfg, threads, out, err);
        }

        RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
        apply_flags(cfg, o);
        cfg.spec.simulation.threads = threads;
        if (validate->parsed())
            return run_validate(cfg, threads, given(o.trials_opt) || cfg.spec.mc_trials > 0, out, err);
        if (sweep->parsed()) {
            if (!cfg.has_sweep) throw InputError(o.config + ": config defines no sweep (missing 'grid')");
            return run_rows(cfg, threads, out, err);
        }
        if (coverage->parsed() || rate->parsed()) {
            cfg.spec.outputs = {coverage->parsed() ? Output::CoverageBreakdown : Output::Rate};
            cfg.spec.mc_trials = 0;
        } else {
            cfg.spec.outputs = {Output::CoverageBreakdown};
            if (o.with_rate) cfg.spec.outputs.push_back(Output::Rate);
            if (!given(o.trials_opt) && cfg.spec.mc_trials == 0) cfg.spec.mc_trials = kDefaultSimulateTrials;
            if (cfg.spec.mc_trials == 0) throw InputError("simulate needs --mc-trials > 0");
        }
        single_point(cfg.spec);
        return run_rows(cfg, threads, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace hetnet::cli
