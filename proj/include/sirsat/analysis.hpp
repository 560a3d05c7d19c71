#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sirsat/model.hpp"

namespace sirsat {

/// Coefficients of a*I^3 + b*I^2 + c*I + d = 0, whose positive roots are the
/// infected coordinates of the endemic equilibria.
struct CubicCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double operator()(double I) const { return ((a * I + b) * I + c) * I + d; }
  double derivative(double I) const { return (3.0 * a * I + 2.0 * b) * I + c; }
  /// Sum of term magnitudes at I; the natural scale for residual checks.
  double magnitude(double I) const;
};

enum class StabilityClass {
  saddle,
  unstable_node,
  unstable_focus,
  degenerate_unstable_node,
  stable_node,
  stable_focus,
  degenerate_stable_node,
  semistable,
  nonhyperbolic,
};

std::string_view to_string(StabilityClass c) noexcept;
std::optional<StabilityClass> stability_from_string(std::string_view s) noexcept;
bool is_asymptotically_stable(StabilityClass c) noexcept;

enum class EquilibriumKind { disease_free, endemic };

std::string_view to_string(EquilibriumKind k) noexcept;

struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::disease_free;
  double S = 0.0;
  double I = 0.0;
  double R = 0.0;
  // Trace negation and determinant of the reduced Jacobian; endemic only.
  std::optional<double> P;
  std::optional<double> Q;
  std::array<std::complex<double>, 2> eigenvalues{};
  StabilityClass stability = StabilityClass::nonhyperbolic;
  // Set when two roots of the cubic merged (saddle-node coalescence).
  bool coalesced = false;
};

/// Positive-root counts allowed by Descartes' rule of signs.
struct DescartesCounts {
  std::vector<int> counts;  // ascending
  int sign_changes = 0;
  // b or c is exactly zero, a case outside the tabulated sign patterns.
  bool zero_inner_coefficient = false;

  bool contains(int n) const;
};

struct TraceDet {
  double P = 0.0;  // -trace(J)
  double Q = 0.0;  // det(J)
};

enum class BifurcationDirection { forward, backward };

std::string_view to_string(BifurcationDirection d) noexcept;

struct TranscriticalInfo {
  BifurcationDirection direction = BifurcationDirection::forward;
  double slope = 0.0;      // dI/dR0 at (R0, I) = (1, 0)
  double threshold = 0.0;  // backward iff beta exceeds this
};

struct SensitivityIndices {
  double upsilon_beta = 0.0;
  double upsilon_lambda = 0.0;
  double upsilon_gamma = 0.0;
  double upsilon_mu = 0.0;
  double upsilon_mu_prime = 0.0;
  double upsilon_alpha = 0.0;
};

/// a_t*I^2 + b_t*S*I + c_t*S + d_t*I + e_t, the divergence of the field
/// weighted by (1+gamma*S)(1+rho*I).
struct DulacCurve {
  double a_t = 0.0;
  double b_t = 0.0;
  double c_t = 0.0;
  double d_t = 0.0;
  double e_t = 0.0;
};

double basic_reproduction_number(const ModelParams& p);

/// beta*lambda - (mu+gamma*lambda)(mu+mu'+alpha); same sign as R0 - 1.
double threshold_numerator(const ModelParams& p);

EquilibriumReport disease_free_equilibrium(const ModelParams& p);

CubicCoeffs cubic_coefficients(const ModelParams& p);

DescartesCounts descartes_possible_counts(const CubicCoeffs& c);

/// S coordinate of an endemic equilibrium with infected coordinate I, from
/// summing the first two equilibrium conditions.
double endemic_susceptible(const ModelParams& p, double I);

/// Endemic equilibria sorted by I ascending. May be empty.
std::vector<EquilibriumReport> endemic_equilibria(const ModelParams& p);

Eigen::Matrix2d jacobian_reduced(const ModelParams& p, double S, double I);

/// Closed-form P = -trace(J) and Q = det(J) at (S, I).
TraceDet trace_det(const ModelParams& p, double S, double I);

/// Requires (S, I) to be an equilibrium of the reduced system.
StabilityClass classify_equilibrium(const ModelParams& p, double S, double I);

/// Classification from (P, Q); p_scale and q_scale set the zero tolerance.
StabilityClass classify_trace_det(double P, double Q, double p_scale, double q_scale);

TranscriticalInfo transcritical_direction(const ModelParams& p);

SensitivityIndices sensitivity_indices(const ModelParams& p);

DulacCurve dulac_curve(const ModelParams& p);

double dulac_value(const DulacCurve& c, double S, double I);

/// Residual bound for equilibria: 1e-8 * max(1, lambda/mu).
double equilibrium_tolerance(const ModelParams& p);

}  // namespace sirsat
