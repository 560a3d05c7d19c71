#pragma once

// SIR model with saturated incidence beta*S*I/(1+gamma*S) and saturated
// recovery alpha*I/(1+rho*I), open population with constant entrance rate.

namespace sirsat {

struct ModelParams {
  double beta = 0.0;      // incidence coefficient
  double lambda = 0.0;    // entrance rate (individuals / time)
  double mu = 0.0;        // baseline exit rate
  double mu_prime = 0.0;  // excess exit rate of infected individuals
  double alpha = 0.0;     // recovery coefficient
  double rho = 0.0;       // bed-occupancy rate, in [0, 1]
  double gamma = 0.0;     // cautiousness level, in [0, 1]

  /// Throws Error(invalid_input) when a field is non-finite or out of range.
  void validate() const;

  ModelParams with_gamma(double g) const {
    ModelParams p = *this;
    p.gamma = g;
    return p;
  }

  /// lambda / mu, the upper bound on the total population inside the domain.
  double population_bound() const { return lambda / mu; }
};

/// beta=0.05, lambda=10, mu=0.01, mu'=0.1, alpha=0.2, rho=0.1.
ModelParams reference_params(double gamma = 0.1);

struct State {
  double S = 0.0;
  double I = 0.0;
  double R = 0.0;

  double total() const { return S + I + R; }
};

struct StateDerivative {
  double dS = 0.0;
  double dI = 0.0;
  double dR = 0.0;
};

struct PlanarDerivative {
  double dS = 0.0;
  double dI = 0.0;
};

inline constexpr double kDefaultDomainTol = 1e-9;

StateDerivative rhs_full(const ModelParams& p, const State& s);

/// First two components of rhs_full; R does not feed back into S or I.
PlanarDerivative rhs_reduced(const ModelParams& p, double S, double I);

/// S, I, R >= -tol and 0 < S+I+R <= lambda/mu + tol.
bool in_domain(const ModelParams& p, const State& s, double tol = kDefaultDomainTol);

namespace detail {

// Unchecked field evaluations used inside integration loops.
inline double incidence(const ModelParams& p, double S, double I) {
  return p.beta * S * I / (1.0 + p.gamma * S);
}

inline double recovery(const ModelParams& p, double I) {
  return p.alpha * I / (1.0 + p.rho * I);
}

inline PlanarDerivative planar_field(const ModelParams& p, double S, double I) {
  const double inc = incidence(p, S, I);
  return {p.lambda - p.mu * S - inc, -(p.mu + p.mu_prime) * I + inc - recovery(p, I)};
}

}  // namespace detail

}  // namespace sirsat
