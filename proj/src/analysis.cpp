#include "sirsat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "sirsat/error.hpp"

namespace sirsat {

namespace {

// Relative magnitude below which P, Q or P^2-4Q count as zero.
constexpr double kZeroTol = 1e-9;
// Leading coefficient treated as vanishing relative to the others.
constexpr double kLeadingTol = 1e-14;
// Complex companion eigenvalues with |Im| below this (relative) are treated
// as a perturbed double root.
constexpr double kImagTol = 1e-6;
// Real roots closer than this (relative) are merged into one coalesced root.
constexpr double kMergeTol = 1e-7;
// Admissibility: S must exceed this.
constexpr double kAdmissibleS = 1e-10;

struct Root {
  double value;
  bool coalesced;
};

double newton_polish(const CubicCoeffs& c, double x) {
  for (int it = 0; it < 60; ++it) {
    const double f = c(x);
    const double df = c.derivative(x);
    if (f == 0.0 || df == 0.0) break;
    const double step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x)) &&
        std::abs(c(x)) <= 1e-13 * c.magnitude(x)) {
      break;
    }
  }
  return x;
}

// Critical point of the cubic near x (root of the derivative).
double critical_point(const CubicCoeffs& c, double x) {
  for (int it = 0; it < 60; ++it) {
    const double g = c.derivative(x);
    const double dg = 6.0 * c.a * x + 2.0 * c.b;
    if (g == 0.0 || dg == 0.0) break;
    const double step = g / dg;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

std::vector<Root> quadratic_roots(double a, double b, double c) {
  std::vector<Root> out;
  const double scale = std::max(std::abs(b), std::abs(c));
  if (std::abs(a) <= kLeadingTol * scale) {
    if (b != 0.0) out.push_back({-c / b, false});
    return out;
  }
  const double disc = b * b - 4.0 * a * c;
  const double dscale = b * b + 4.0 * std::abs(a * c);
  if (std::abs(disc) <= 1e-14 * dscale) {
    out.push_back({-b / (2.0 * a), true});
    return out;
  }
  if (disc < 0.0) return out;
  // Numerically stable pair.
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  out.push_back({q / a, false});
  if (q != 0.0) out.push_back({c / q, false});
  return out;
}

std::vector<Root> real_roots(const CubicCoeffs& c) {
  const double scale = std::max({std::abs(c.b), std::abs(c.c), std::abs(c.d)});
  if (std::abs(c.a) < kLeadingTol * scale || c.a == 0.0) {
    return quadratic_roots(c.b, c.c, c.d);
  }

  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(0, 0) = -c.b / c.a;
  companion(0, 1) = -c.c / c.a;
  companion(0, 2) = -c.d / c.a;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, false);
  const auto ev = solver.eigenvalues();

  std::vector<Root> roots;
  for (int k = 0; k < 3; ++k) {
    const double re = ev[k].real();
    const double im = ev[k].imag();
    const double tol = kImagTol * std::max(1.0, std::abs(re));
    if (im == 0.0) {
      roots.push_back({newton_polish(c, re), false});
    } else if (im > 0.0 && im <= tol) {
      // Near-double root perturbed off the real axis: accept the critical
      // point if the cubic nearly vanishes there.
      const double xc = critical_point(c, re);
      if (std::abs(c(xc)) <= 1e-9 * c.magnitude(xc)) roots.push_back({xc, true});
    }
  }

  std::sort(roots.begin(), roots.end(),
            [](const Root& l, const Root& r) { return l.value < r.value; });
  std::vector<Root> merged;
  for (const Root& r : roots) {
    if (!merged.empty()) {
      Root& last = merged.back();
      const double span = std::max(std::abs(last.value), std::abs(r.value));
      if (std::abs(r.value - last.value) <= kMergeTol * std::max(1.0, span)) {
        last.value = critical_point(c, 0.5 * (last.value + r.value));
        last.coalesced = true;
        continue;
      }
    }
    merged.push_back(r);
  }
  return merged;
}

struct Scales {
  double p;
  double q;
};

Scales trace_det_scales(const ModelParams& p, double S, double I) {
  const double gs = 1.0 + p.gamma * S;
  const double ri = 1.0 + p.rho * I;
  const double t1 = p.alpha / (ri * ri);
  const double t2 = p.beta * std::abs(I) / (gs * gs);
  const double t3 = p.beta * std::abs(S) / std::abs(gs);
  const double ps = 2.0 * p.mu + p.mu_prime + t1 + t2 + t3;
  const double qs = p.mu * p.mu + p.mu * p.mu_prime + p.mu * t1 + (p.mu + p.mu_prime) * t2 +
                    t2 * p.alpha / (ri * ri) + p.mu * t3;
  return {ps, qs};
}

std::array<std::complex<double>, 2> eigen_pair(double P, double Q) {
  // Roots of x^2 + P x + Q.
  const std::complex<double> disc = std::sqrt(std::complex<double>(P * P - 4.0 * Q, 0.0));
  return {(-P - disc) / 2.0, (-P + disc) / 2.0};
}

}  // namespace

double CubicCoeffs::magnitude(double I) const {
  const double x = std::abs(I);
  return std::abs(a) * x * x * x + std::abs(b) * x * x + std::abs(c) * x + std::abs(d);
}

std::string_view to_string(StabilityClass c) noexcept {
  switch (c) {
    case StabilityClass::saddle: return "saddle";
    case StabilityClass::unstable_node: return "unstable_node";
    case StabilityClass::unstable_focus: return "unstable_focus";
    case StabilityClass::degenerate_unstable_node: return "degenerate_unstable_node";
    case StabilityClass::stable_node: return "stable_node";
    case StabilityClass::stable_focus: return "stable_focus";
    case StabilityClass::degenerate_stable_node: return "degenerate_stable_node";
    case StabilityClass::semistable: return "semistable";
    case StabilityClass::nonhyperbolic: return "nonhyperbolic";
  }
  return "nonhyperbolic";
}

std::optional<StabilityClass> stability_from_string(std::string_view s) noexcept {
  for (auto c : {StabilityClass::saddle, StabilityClass::unstable_node,
                 StabilityClass::unstable_focus, StabilityClass::degenerate_unstable_node,
                 StabilityClass::stable_node, StabilityClass::stable_focus,
                 StabilityClass::degenerate_stable_node, StabilityClass::semistable,
                 StabilityClass::nonhyperbolic}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

bool is_asymptotically_stable(StabilityClass c) noexcept {
  return c == StabilityClass::stable_node || c == StabilityClass::stable_focus ||
         c == StabilityClass::degenerate_stable_node;
}

std::string_view to_string(EquilibriumKind k) noexcept {
  return k == EquilibriumKind::disease_free ? "disease_free" : "endemic";
}

std::string_view to_string(BifurcationDirection d) noexcept {
  return d == BifurcationDirection::forward ? "forward" : "backward";
}

bool DescartesCounts::contains(int n) const {
  return std::find(counts.begin(), counts.end(), n) != counts.end();
}

double threshold_numerator(const ModelParams& p) {
  return p.beta * p.lambda - (p.mu + p.gamma * p.lambda) * (p.mu + p.mu_prime + p.alpha);
}

double basic_reproduction_number(const ModelParams& p) {
  return p.beta * p.lambda / ((p.mu + p.gamma * p.lambda) * (p.mu + p.mu_prime + p.alpha));
}

double equilibrium_tolerance(const ModelParams& p) {
  return 1e-8 * std::max(1.0, p.population_bound());
}

EquilibriumReport disease_free_equilibrium(const ModelParams& p) {
  EquilibriumReport r;
  r.kind = EquilibriumKind::disease_free;
  r.S = p.population_bound();
  const double e1 = -p.mu;
  const double e2 = threshold_numerator(p) / (p.mu + p.gamma * p.lambda);
  r.eigenvalues = {std::complex<double>(e1, 0.0), std::complex<double>(e2, 0.0)};
  const double r0 = basic_reproduction_number(p);
  if (std::abs(r0 - 1.0) <= kZeroTol) {
    r.stability = StabilityClass::semistable;
  } else if (r0 < 1.0) {
    r.stability = std::abs(e2 - e1) <= kZeroTol * std::abs(e1) ? StabilityClass::degenerate_stable_node
                                                                 : StabilityClass::stable_node;
  } else {
    r.stability = StabilityClass::saddle;
  }
  return r;
}

CubicCoeffs cubic_coefficients(const ModelParams& p) {
  const double m = p.mu + p.mu_prime + p.alpha;
  const double sat = p.mu + p.gamma * p.lambda;
  const double k = threshold_numerator(p);  // (mu+gamma*lambda)*m*(R0-1)
  const double w = (p.mu + p.mu_prime) * p.gamma - p.beta;
  const double rho = p.rho;
  CubicCoeffs c;
  c.a = rho * rho * (p.mu + p.mu_prime) * w;
  c.b = rho * rho * (k + p.alpha * sat) + rho * p.alpha * p.beta + 2.0 * rho * m * w;
  c.c = 2.0 * rho * k + m * w + p.gamma * p.alpha * m + rho * p.alpha * sat;
  c.d = k;
  return c;
}

DescartesCounts descartes_possible_counts(const CubicCoeffs& c) {
  DescartesCounts out;
  out.zero_inner_coefficient = (c.b == 0.0 || c.c == 0.0);
  int prev = 0;
  for (double v : {c.a, c.b, c.c, c.d}) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++out.sign_changes;
    prev = s;
  }
  for (int n = out.sign_changes; n >= 0; n -= 2) out.counts.push_back(n);
  std::sort(out.counts.begin(), out.counts.end());
  return out;
}

double endemic_susceptible(const ModelParams& p, double I) {
  return p.lambda / p.mu -
         I * (p.alpha / (p.mu * (1.0 + p.rho * I)) + (p.mu + p.mu_prime) / p.mu);
}

std::vector<EquilibriumReport> endemic_equilibria(const ModelParams& p) {
  const CubicCoeffs cubic = cubic_coefficients(p);
  const double i_floor = 1e-12 * std::max(1.0, p.population_bound());
  std::vector<EquilibriumReport> out;
  for (const Root& root : real_roots(cubic)) {
    const double I = root.value;
    if (!(I > i_floor)) continue;
    const double S = endemic_susceptible(p, I);
    if (!(S > kAdmissibleS)) continue;
    EquilibriumReport r;
    r.kind = EquilibriumKind::endemic;
    r.S = S;
    r.I = I;
    r.R = p.alpha * I / (p.mu * (1.0 + p.rho * I));
    const TraceDet td = trace_det(p, S, I);
    const Scales sc = trace_det_scales(p, S, I);
    r.P = td.P;
    r.Q = td.Q;
    r.eigenvalues = eigen_pair(td.P, td.Q);
    r.stability = classify_trace_det(td.P, td.Q, sc.p, sc.q);
    r.coalesced = root.coalesced;
    out.push_back(r);
  }
  return out;
}

Eigen::Matrix2d jacobian_reduced(const ModelParams& p, double S, double I) {
  const double gs = 1.0 + p.gamma * S;
  const double ri = 1.0 + p.rho * I;
  Eigen::Matrix2d j;
  j(0, 0) = -p.mu - p.beta * I / gs + p.beta * p.gamma * S * I / (gs * gs);
  j(0, 1) = -p.beta * S / gs;
  j(1, 0) = p.beta * I / gs - p.beta * p.gamma * S * I / (gs * gs);
  j(1, 1) = -p.mu - p.mu_prime + p.beta * S / gs - p.alpha / ri + p.rho * p.alpha * I / (ri * ri);
  return j;
}

TraceDet trace_det(const ModelParams& p, double S, double I) {
  const double gs = 1.0 + p.gamma * S;
  const double ri = 1.0 + p.rho * I;
  const double gs2 = gs * gs;
  const double ri2 = ri * ri;
  TraceDet td;
  td.P = 2.0 * p.mu + p.mu_prime + p.alpha / ri2 + p.beta * I / gs2 - p.beta * S / gs;
  td.Q = p.mu * p.mu + p.mu * p.mu_prime + p.mu * p.alpha / ri2 +
         (p.mu + p.mu_prime) * p.beta * I / gs2 + p.beta * p.alpha * I / (gs2 * ri2) -
         p.mu * p.beta * S / gs;
  return td;
}

StabilityClass classify_trace_det(double P, double Q, double p_scale, double q_scale) {
  const bool zero_q = std::abs(Q) <= kZeroTol * q_scale;
  const bool zero_p = std::abs(P) <= kZeroTol * p_scale;
  if (zero_q) {
    // One zero eigenvalue; the other is -P.
    return (P > 0.0 && !zero_p) ? StabilityClass::semistable : StabilityClass::nonhyperbolic;
  }
  if (Q < 0.0) return StabilityClass::saddle;
  if (zero_p) return StabilityClass::nonhyperbolic;
  const double disc = P * P - 4.0 * Q;
  const bool zero_disc = std::abs(disc) <= kZeroTol * (P * P + 4.0 * std::abs(Q));
  if (P < 0.0) {
    if (zero_disc) return StabilityClass::degenerate_unstable_node;
    return disc > 0.0 ? StabilityClass::unstable_node : StabilityClass::unstable_focus;
  }
  if (zero_disc) return StabilityClass::degenerate_stable_node;
  return disc > 0.0 ? StabilityClass::stable_node : StabilityClass::stable_focus;
}

StabilityClass classify_equilibrium(const ModelParams& p, double S, double I) {
  const PlanarDerivative f = rhs_reduced(p, S, I);
  if (std::hypot(f.dS, f.dI) > equilibrium_tolerance(p)) {
    throw Error(ErrorKind::invalid_input, "point is not an equilibrium of the reduced system");
  }
  const TraceDet td = trace_det(p, S, I);
  const Scales sc = trace_det_scales(p, S, I);
  return classify_trace_det(td.P, td.Q, sc.p, sc.q);
}

TranscriticalInfo transcritical_direction(const ModelParams& p) {
  const double m = p.mu + p.mu_prime + p.alpha;
  const double m3 = m * m * m;
  const double lam2 = p.lambda * p.lambda;
  const double denom = p.mu * m3 - p.alpha * p.beta * lam2 * p.rho;
  if (std::abs(denom) <= 1e-14 * p.mu * m3) {
    throw Error(ErrorKind::degenerate, "beta equals the forward/backward threshold");
  }
  TranscriticalInfo info;
  info.threshold = p.rho > 0.0 ? p.mu * m3 / (p.alpha * lam2 * p.rho)
                               : std::numeric_limits<double>::infinity();
  info.slope = p.beta * lam2 * m / denom;
  info.direction = p.beta > info.threshold ? BifurcationDirection::backward
                                           : BifurcationDirection::forward;
  return info;
}

SensitivityIndices sensitivity_indices(const ModelParams& p) {
  const double m = p.mu + p.mu_prime + p.alpha;
  const double sat = p.mu + p.gamma * p.lambda;
  SensitivityIndices s;
  s.upsilon_beta = 1.0;
  s.upsilon_lambda = p.mu / sat;
  s.upsilon_gamma = -p.gamma * p.lambda / sat;
  s.upsilon_mu = -p.mu * (2.0 * p.mu + p.mu_prime + p.alpha + p.gamma * p.lambda) / (m * sat);
  s.upsilon_mu_prime = -p.mu_prime / m;
  s.upsilon_alpha = -p.alpha / m;
  return s;
}

DulacCurve dulac_curve(const ModelParams& p) {
  const double g = p.gamma;
  DulacCurve c;
  c.a_t = -p.beta * p.rho;
  c.b_t = -4.0 * g * p.mu * p.rho - 2.0 * g * p.mu_prime * p.rho + 2.0 * p.beta * p.rho;
  c.c_t = -p.alpha * g - 3.0 * g * p.mu - g * p.mu_prime + p.beta;
  c.d_t = g * p.lambda * p.rho - 3.0 * p.mu * p.rho - 2.0 * p.mu_prime * p.rho - p.beta;
  c.e_t = g * p.lambda - p.alpha - 2.0 * p.mu - p.mu_prime;
  return c;
}

double dulac_value(const DulacCurve& c, double S, double I) {
  return c.a_t * I * I + c.b_t * S * I + c.c_t * S + c.d_t * I + c.e_t;
}

}  // namespace sirsat
