#pragma once

// Closed-form and quadrature evaluation of association, geometry, coverage
// and covered-rate quantities for the two-tier network.

#include <string>

#include "hetnet/core.hpp"
#include "hetnet/numerics.hpp"

namespace hetnet::analytic {

/// Density of the (access, backhaul) distance pair under pico association.
///  - Exact: the void-probability density with the backhaul macro's angle
///    restricted to the arc outside the inner macro disc; integrates to p_s.
///  - MixedPartial: the literal piecewise expressions (closed forms where the
///    discs are disjoint or nested, a finite-difference mixed partial of the
///    void probability in between). It integrates to ~1 rather than p_s and
///    is scaled by p_s when used inside coverage integrals; diagnostic only.
enum class DensityForm { Exact, MixedPartial };

std::string_view to_string(DensityForm form);

struct AnalyticOptions {
    numerics::QuadratureSpec quad{};
    DensityForm density = DensityForm::Exact;
    /// Drop the lens-intersection region of the joint density entirely.
    bool approx_ac = false;
    /// Throw NumericalError instead of returning converged = false.
    bool strict = false;
    /// Integrate the macro-association distance pair as a literal 2-D integral
    /// instead of using the closed-form marginal over the pico distance.
    bool macro_literal_2d = false;
};

/// A quadrature-backed scalar with its error bookkeeping.
struct Evaluation {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    /// Name of the innermost nesting level that failed to converge, if any.
    std::string failed_stage;

    void absorb(const numerics::IntegralResult& r, const char* stage);
    void absorb(const Evaluation& e);
};

struct AssociationProbabilities {
    double p_s = 0.0;
    double p_m = 1.0;
    double error_estimate = 0.0;
    bool converged = true;
};

AssociationProbabilities association_probability(const NetworkParams& p, const AnalyticOptions& opts = {});

enum class TopologyCase { A, B, C, Forbidden };

std::string_view to_string(TopologyCase c);

/// Region of the (r_s, r) plane, with R0 = r_s^(alpha_s/alpha_m) / Delta_m
/// the radius of the macro-free disc about the user. Case A: r <= r_s - R0
/// (the backhaul disc misses the inner macro disc). Case C: r >= r_s + R0
/// (it engulfs it). Case B: the discs overlap in a lens. Forbidden:
/// r < R0 - r_s. lower = |r_s - R0| and upper = r_s + R0 bound case B.
struct JointPdfCase {
    TopologyCase kind = TopologyCase::C;
    double lower = 0.0;
    double upper = 0.0;
    bool delta_m_at_least_one = true;
};

JointPdfCase classify(double r_s, double r, const NetworkParams& p);

/// Joint density of (r_s, r); 0 in the forbidden region.
double joint_pdf(double r_s, double r, const NetworkParams& p, DensityForm form = DensityForm::Exact);

struct TopologyProbabilities {
    double p_A = 0.0;
    double p_B = 0.0;
    double p_C = 0.0;
    /// Integral of the density over the whole plane divided by p_s.
    double total = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

TopologyProbabilities topology_probabilities(const NetworkParams& p, const AnalyticOptions& opts = {});

/// Exponents of the conditional coverage integrand at one (r_s, r).
struct SmallCellTerms {
    double pico_functional = 0.0;   // L_s
    double macro_functional = 0.0;  // L_m
    double self_interference = 0.0; // exponent of the residual self-interference factor
    double backhaul_macro = 1.0;    // average of g(s1', r_m) over the backhaul-macro arc
    bool converged = true;

    [[nodiscard]] double factor() const;
};

/// Thresholds of zero switch the corresponding link constraint off (used for
/// single-link conditional coverages).
SmallCellTerms smallcell_terms(const NetworkParams& p, double T_s, double T_b, DuplexMode mode, double r_s, double r,
                               const AnalyticOptions& opts = {});

/// Joint probability of pico association and coverage of both the access and
/// the backhaul link.
Evaluation coverage_smallcell(const NetworkParams& p, double T_s, double T_b, DuplexMode mode,
                              const AnalyticOptions& opts = {});

/// Pr(case B | small-cell coverage): the share of the joint small-cell
/// coverage contributed by configurations whose backhaul disc and inner macro
/// disc intersect in a lens, as a quotient of the restricted and full
/// integrals.
Evaluation intersection_given_coverage(const NetworkParams& p, double T_s, double T_b, DuplexMode mode,
                                       const AnalyticOptions& opts = {});

/// Joint probability of macro association and macro access coverage.
Evaluation coverage_macro(const NetworkParams& p, double T_m, DuplexMode mode, const AnalyticOptions& opts = {});

/// Integral of 1 / (1 + u^(alpha/2)) over [lower, inf).
double interference_tail(double lower, double alpha);

struct CoverageBreakdown {
    double p_total = 0.0;
    double p_smallcell_joint = 0.0;
    double p_macro_joint = 0.0;
    double p_assoc_s = 0.0;
    double p_assoc_m = 1.0;
    /// Pr(SIR_sm > T_b | pico association) and Pr(SIR_us > T_s | pico association).
    double backhaul_conditional = 0.0;
    double access_conditional = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    std::string failed_stage;
};

/// With `with_link_conditionals` false the two conditional link coverages
/// are left at zero (they cost two extra small-cell integrals).
CoverageBreakdown coverage_total(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                                 const AnalyticOptions& opts = {}, bool with_link_conditionals = true);

struct RateBreakdown {
    double rate_total = 0.0;
    double rate_macro_term = 0.0;
    double rate_smallcell_term = 0.0;
    double coverage_used = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    std::string failed_stage;

    [[nodiscard]] double macro_share() const { return rate_macro_term / coverage_used; }
    [[nodiscard]] double smallcell_share() const { return rate_smallcell_term / coverage_used; }
};

/// Bandwidth prefactor of a link: 1 for IBFD, kappa for FDD's half allocation.
double bandwidth_factor(const NetworkParams& p, DuplexMode mode);

/// Unnormalised macro addend of the covered rate: E[R_um 1{covered, macro}].
Evaluation rate_macro_term(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                           const AnalyticOptions& opts = {});

/// Unnormalised small-cell addend: E[min(R_us, R_sm) 1{covered, pico}].
Evaluation rate_smallcell_term(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                               const AnalyticOptions& opts = {});

/// Covered rate: (macro + small-cell addends) / Pr(covered).
RateBreakdown rate_covered(const NetworkParams& p, const Thresholds& th, DuplexMode mode,
                           const AnalyticOptions& opts = {});

}  // namespace hetnet::analytic
