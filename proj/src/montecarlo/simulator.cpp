#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "hetnet/error.hpp"
#include "hetnet/kernels.hpp"
#include "hetnet/montecarlo.hpp"
#include "hetnet/numerics.hpp"

namespace hetnet::montecarlo {

namespace {

std::atomic<std::uint64_t> g_trials{0};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent streams carved out of one seed.
enum Stream : std::uint64_t { kMacroStream = 1, kPicoStream = 2, kFadingStream = 3 };

std::uint64_t substream(std::uint64_t seed, Stream s) { return splitmix64(seed ^ splitmix64(s)); }

/// Uniform on [0, 1) from the top 53 bits of one engine output.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Structure-of-arrays copy of a point set relative to `origin`, wrapped to
/// the nearest periodic image on the torus.
struct Columns {
    std::vector<double> x;
    std::vector<double> y;
};

double wrap_coordinate(double v, double w) {
    if (v > w) return v - 2.0 * w;
    if (v < -w) return v + 2.0 * w;
    return v;
}

void relative_to(const std::vector<Point2>& pts, Point2 origin, const SimulationWindow& window, Columns& c) {
    c.x.resize(pts.size());
    c.y.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double dx = pts[i].x - origin.x;
        double dy = pts[i].y - origin.y;
        if (window.wrap) {
            dx = wrap_coordinate(dx, window.half_width);
            dy = wrap_coordinate(dy, window.half_width);
        }
        c.x[i] = dx;
        c.y[i] = dy;
    }
}

class Fading {
public:
    explicit Fading(std::uint64_t seed) : rng_(seed) {}

    double draw() { return -std::log(uniform_open()); }

    /// g[i] = power * h_i with h_i unit-mean exponential.
    std::vector<double>& gains(std::vector<double>& g, std::size_t n, double power) {
        g.resize(n);
        for (double& u : g) u = uniform_open();
        kernels::active().exponential_from_uniform(g.data(), n);
        for (double& v : g) v *= power;
        return g;
    }

private:
    double uniform_open() { return 1.0 - unit(rng_); }

    std::mt19937_64 rng_;
};

double interference(const Columns& c, const std::vector<double>& gain, double alpha) {
    if (c.x.empty()) return 0.0;
    return kernels::active().sum_power_law(c.x.data(), c.y.data(), gain.data(), c.x.size(), 0.0, 0.0, 0.5 * alpha);
}

double sir(double signal, double interference_power) {
    if (!(interference_power > 0.0)) return kSirCap;
    return std::min(signal / interference_power, kSirCap);
}

/// Per-thread scratch reused across trials.
struct Workspace {
    Columns macros;
    Columns picos;
    Columns macros_at_pico;
    Columns picos_at_pico;
    std::vector<double> gain;
};

/// Integral of |z|^-alpha over the plane outside the square [-w, w]^2:
/// 8 w^(2-alpha) / (alpha-2) * int_0^{pi/4} cos^(alpha-2) theta dtheta.
double outside_square(double w, double alpha) {
    const auto j = numerics::integrate_1d([&](double th) { return std::pow(std::cos(th), alpha - 2.0); }, 0.0,
                                          kPi / 4.0, numerics::QuadratureSpec{1e-14, 1e-12, 50, 1.0});
    return 8.0 * std::pow(w, 2.0 - alpha) / (alpha - 2.0) * j.value;
}

kernels::NearestResult nearest(const Columns& c) {
    return kernels::active().nearest(c.x.data(), c.y.data(), c.x.size(), 0.0, 0.0);
}

struct Outcome {
    bool pico = false;
    bool covered = false;
    double rate = 0.0;
};

unsigned worker_count(unsigned requested, std::uint64_t n_trials) {
    unsigned t = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(n_trials, 1)));
}

/// Run all trials; outcome i depends only on (master_seed, i).
std::vector<Outcome> run_trials(const NetworkParams& p, const Thresholds& th, DuplexMode mode, std::uint64_t n_trials,
                                const SimulationSetup& setup, std::uint64_t master_seed) {
    p.validate();
    th.validate();
    setup.window.validate();
    if (n_trials < 1) throw InputError("n_trials must be at least 1");

    const double bw = mode == DuplexMode::IBFD ? 1.0 : p.kappa;
    const double n = p.picos_per_macro();
    std::vector<Outcome> out(n_trials);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t i = next.fetch_add(1); i < n_trials; i = next.fetch_add(1)) {
            const std::uint64_t seed = trial_seed(master_seed, i);
            const NetworkRealization net = sample_network(p, setup.window, seed, setup.fixed_count);
            const UserRecord u = evaluate_user(net, p, mode, net.rng_state, setup.window);
            Outcome& o = out[i];
            o.pico = u.associated_tier == Tier::Pico;
            if (o.pico) {
                o.covered = u.sir_us > th.T_s && u.sir_sm > th.T_b;
                const double access = bw * std::log2(1.0 + u.sir_us);
                const double backhaul = p.eta > 0.0 ? bw * p.eta / n * std::log2(1.0 + u.sir_sm) : 0.0;
                o.rate = std::min(access, backhaul);
            } else {
                o.covered = u.sir_um > th.T_m;
                o.rate = bw * (1.0 - p.eta) * std::log2(1.0 + u.sir_um);
            }
        }
    };
    const unsigned workers = worker_count(setup.threads, n_trials);
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    pool.clear();
    g_trials += n_trials;
    return out;
}

EstimateWithCI from_moments(double mean, double variance, std::uint64_t n) {
    EstimateWithCI e;
    e.mean = mean;
    e.n_trials = n;
    e.std_error = std::sqrt(std::max(variance, 0.0) / static_cast<double>(n));
    e.ci95_low = mean - 1.96 * e.std_error;
    e.ci95_high = mean + 1.96 * e.std_error;
    return e;
}

/// Neumaier-compensated running sum.
class Sum {
public:
    void add(double v) {
        const double t = sum_ + v;
        comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

EstimateWithCI sample_mean(const std::vector<double>& v) {
    Sum s;
    for (double x : v) s.add(x);
    const double n = static_cast<double>(v.size());
    const double mean = s.value() / n;
    Sum sq;
    for (double x : v) sq.add((x - mean) * (x - mean));
    const double var = v.size() > 1 ? sq.value() / (n - 1.0) : 0.0;
    return from_moments(mean, var, v.size());
}

}  // namespace

void SimulationWindow::validate() const {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw InputError("window half_width must be positive");
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) + index);
}

std::uint64_t trials_simulated() { return g_trials.load(); }

std::vector<Point2> sample_ppp(double intensity, const SimulationWindow& window, std::uint64_t seed,
                               bool fixed_count) {
    window.validate();
    if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw InputError("intensity must be non-negative");
    std::mt19937_64 rng(seed);
    const double mean = intensity * window.area();
    std::uint64_t count = 0;
    if (fixed_count)
        count = static_cast<std::uint64_t>(std::llround(mean));
    else if (mean > 0.0)
        count = std::poisson_distribution<std::uint64_t>(mean)(rng);
    const double w = window.half_width;
    std::vector<Point2> pts(count);
    for (Point2& q : pts) {
        q.x = w * (2.0 * unit(rng) - 1.0);
        q.y = w * (2.0 * unit(rng) - 1.0);
    }
    return pts;
}

NetworkRealization sample_network(const NetworkParams& p, const SimulationWindow& window, std::uint64_t seed,
                                  bool fixed_count) {
    NetworkRealization r;
    r.macro_points = sample_ppp(p.lambda_m, window, substream(seed, kMacroStream), fixed_count);
    r.pico_points = sample_ppp(p.lambda_s, window, substream(seed, kPicoStream), fixed_count);
    r.rng_state = substream(seed, kFadingStream);
    return r;
}

UserRecord evaluate_user(const NetworkRealization& net, const NetworkParams& p, DuplexMode mode, std::uint64_t seed,
                         const SimulationWindow& window) {
    if (net.macro_points.empty()) throw InputError("no station in tier");
    const bool ibfd = mode == DuplexMode::IBFD;
    Fading fading(seed);
    thread_local Workspace ws;
    std::vector<double>& gain = ws.gain;
    UserRecord u;

    const Columns& macros = ws.macros;
    const Columns& picos = ws.picos;
    relative_to(net.macro_points, {}, window, ws.macros);
    relative_to(net.pico_points, {}, window, ws.picos);
    const kernels::NearestResult m = nearest(macros);
    const double d_m = std::sqrt(m.dist_sq);

    bool pico = false;
    kernels::NearestResult s;
    if (!picos.x.empty()) {
        s = nearest(picos);
        const double d_s = std::sqrt(s.dist_sq);
        pico = std::log(p.P_s * p.B_s) - p.alpha_s * std::log(d_s) > std::log(p.P_m * p.B_m) - p.alpha_m * std::log(d_m);
    }

    double far_macro = 0.0;
    double far_pico = 0.0;
    if (window.far_field_mean && !window.wrap) {
        far_macro = p.lambda_m * p.P_m * outside_square(window.half_width, p.alpha_m);
        far_pico = p.lambda_s * p.P_s * outside_square(window.half_width, p.alpha_s);
    }

    if (!pico) {
        u.associated_tier = Tier::Macro;
        u.serving_distance = d_m;
        const double signal = p.P_m * fading.draw() * std::pow(d_m, -p.alpha_m);
        fading.gains(gain, macros.x.size(), p.P_m)[m.index] = 0.0;
        double I = interference(macros, gain, p.alpha_m) + far_macro;
        if (ibfd) I += interference(picos, fading.gains(gain, picos.x.size(), p.P_s), p.alpha_s) + far_pico;
        u.sir_um = sir(signal, I);
        return u;
    }

    u.associated_tier = Tier::Pico;
    const Point2 serving = net.pico_points[s.index];
    u.serving_distance = std::sqrt(s.dist_sq);

    // Access link: every other pico; under IBFD every macro too, the
    // backhauling one included.
    const double access_signal = p.P_s * fading.draw() * std::pow(u.serving_distance, -p.alpha_s);
    fading.gains(gain, picos.x.size(), p.P_s)[s.index] = 0.0;
    double I_access = interference(picos, gain, p.alpha_s) + far_pico;
    if (ibfd) I_access += interference(macros, fading.gains(gain, macros.x.size(), p.P_m), p.alpha_m) + far_macro;
    u.sir_us = sir(access_signal, I_access);

    // Backhaul link at the pico: every macro but the serving one; under IBFD
    // also the other picos and the residual self-interference.
    relative_to(net.macro_points, serving, window, ws.macros_at_pico);
    const kernels::NearestResult b = nearest(ws.macros_at_pico);
    const double backhaul_signal = p.P_m * fading.draw() * std::pow(b.dist_sq, -0.5 * p.alpha_m);
    fading.gains(gain, macros.x.size(), p.P_m)[b.index] = 0.0;
    // The far field is taken as seen from the origin; the pico's offset is
    // a second-order correction at window scale.
    double I_backhaul = interference(ws.macros_at_pico, gain, p.alpha_m) + far_macro;
    if (ibfd) {
        relative_to(net.pico_points, serving, window, ws.picos_at_pico);
        fading.gains(gain, picos.x.size(), p.P_s)[s.index] = 0.0;
        I_backhaul += interference(ws.picos_at_pico, gain, p.alpha_s) + far_pico;
        const double si_power = p.self_interference == SelfInterferencePower::Pico ? p.P_s : p.P_m;
        I_backhaul += p.beta * si_power;
    }
    u.sir_sm = sir(backhaul_signal, I_backhaul);
    return u;
}

EstimateWithCI proportion_estimate(std::uint64_t successes, std::uint64_t n) {
    if (n < 1) throw InputError("n_trials must be at least 1");
    const double mean = static_cast<double>(successes) / static_cast<double>(n);
    return from_moments(mean, mean * (1.0 - mean), n);
}

CoverageEstimate estimate_coverage_breakdown(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                                             std::uint64_t n_trials, const SimulationSetup& setup,
                                             std::uint64_t master_seed) {
    const std::vector<Outcome> out = run_trials(p, th, mode, n_trials, setup, master_seed);
    std::uint64_t pico = 0;
    std::uint64_t pico_cov = 0;
    std::uint64_t macro_cov = 0;
    for (const Outcome& o : out) {
        pico += o.pico;
        pico_cov += o.pico && o.covered;
        macro_cov += !o.pico && o.covered;
    }
    CoverageEstimate e;
    e.total = proportion_estimate(pico_cov + macro_cov, n_trials);
    e.smallcell_joint = proportion_estimate(pico_cov, n_trials);
    e.macro_joint = proportion_estimate(macro_cov, n_trials);
    e.pico_association = proportion_estimate(pico, n_trials);
    return e;
}

EstimateWithCI estimate_coverage(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                                 std::uint64_t n_trials, const SimulationSetup& setup, std::uint64_t master_seed) {
    return estimate_coverage_breakdown(p, th, mode, n_trials, setup, master_seed).total;
}

RateEstimate estimate_rate_breakdown(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                                     std::uint64_t n_trials, const SimulationSetup& setup, std::uint64_t master_seed) {
    const std::vector<Outcome> out = run_trials(p, th, mode, n_trials, setup, master_seed);
    std::vector<double> macro(n_trials);
    std::vector<double> small(n_trials);
    std::vector<double> covered(n_trials);
    std::uint64_t n_covered = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = out[i].covered ? out[i].rate : 0.0;
        (out[i].pico ? small : macro)[i] = r;
        covered[i] = out[i].covered ? 1.0 : 0.0;
        n_covered += out[i].covered;
    }
    if (n_covered == 0) throw NumericalError("conditioning event empty in sample");

    RateEstimate e;
    e.macro_term = sample_mean(macro);
    e.smallcell_term = sample_mean(small);
    e.coverage = proportion_estimate(n_covered, n_trials);
    // Ratio estimator Y/C with a delta-method standard error.
    const double c = e.coverage.mean;
    const double ratio = (e.macro_term.mean + e.smallcell_term.mean) / c;
    std::vector<double> residual(n_trials);
    for (std::size_t i = 0; i < out.size(); ++i) residual[i] = macro[i] + small[i] - ratio * covered[i];
    const EstimateWithCI res = sample_mean(residual);
    const double var = res.std_error * res.std_error * static_cast<double>(n_trials) / (c * c);
    e.covered_rate = from_moments(ratio, var, n_trials);
    return e;
}

EstimateWithCI estimate_rate(const NetworkParams& p, const Thresholds& th, DuplexMode mode, std::uint64_t n_trials,
                             const SimulationSetup& setup, std::uint64_t master_seed) {
    return estimate_rate_breakdown(p, th, mode, n_trials, setup, master_seed).covered_rate;
}

}  // namespace hetnet::montecarlo
