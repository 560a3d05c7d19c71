#include "sirsat/model.hpp"

#include <cmath>
#include <string>

#include "sirsat/error.hpp"

namespace sirsat {

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw Error(ErrorKind::invalid_input, std::string(name) + " must be finite and > 0");
  }
}

void require_unit(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw Error(ErrorKind::invalid_input, std::string(name) + " must lie in [0, 1]");
  }
}

void require_state(const State& s) {
  if (!std::isfinite(s.S) || !std::isfinite(s.I) || !std::isfinite(s.R)) {
    throw Error(ErrorKind::invalid_input, "state has non-finite components");
  }
}

}  // namespace

void ModelParams::validate() const {
  require_positive(beta, "beta");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_positive(mu_prime, "mu_prime");
  require_positive(alpha, "alpha");
  require_unit(rho, "rho");
  require_unit(gamma, "gamma");
}

ModelParams reference_params(double gamma) {
  return ModelParams{0.05, 10.0, 0.01, 0.1, 0.2, 0.1, gamma};
}

StateDerivative rhs_full(const ModelParams& p, const State& s) {
  require_state(s);
  const PlanarDerivative d = detail::planar_field(p, s.S, s.I);
  return {d.dS, d.dI, -p.mu * s.R + detail::recovery(p, s.I)};
}

PlanarDerivative rhs_reduced(const ModelParams& p, double S, double I) {
  if (!std::isfinite(S) || !std::isfinite(I)) {
    throw Error(ErrorKind::invalid_input, "state has non-finite components");
  }
  return detail::planar_field(p, S, I);
}

bool in_domain(const ModelParams& p, const State& s, double tol) {
  if (!std::isfinite(s.S) || !std::isfinite(s.I) || !std::isfinite(s.R)) return false;
  if (s.S < -tol || s.I < -tol || s.R < -tol) return false;
  const double n = s.total();
  return n > 0.0 && n <= p.population_bound() + tol;
}

}  // namespace sirsat
