#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's closed forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/LU>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "sirsat/model.hpp"

namespace oracle {

using Rational = boost::rational<boost::multiprecision::cpp_int>;

inline Rational q(long long num, long long den = 1) { return Rational(num, den); }

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

struct RationalParams {
  Rational beta = q(1, 20);
  Rational lambda = q(10);
  Rational mu = q(1, 100);
  Rational mu_prime = q(1, 10);
  Rational alpha = q(1, 5);
  Rational rho = q(1, 10);
  Rational gamma = q(0);
};

// Polynomial in I, ascending coefficients.
template <class T>
std::vector<T> poly_mul(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> r(a.size() + b.size() - 1, T(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

template <class T>
std::vector<T> poly_add(std::vector<T> a, const std::vector<T>& b, T scale_b = T(1)) {
  if (a.size() < b.size()) a.resize(b.size(), T(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale_b * b[i];
  return a;
}

// Eliminating S from the two equilibrium conditions:
//   N(I) = mu*S*(1+rho*I) = lambda(1+rho I) - (mu+mu') I (1+rho I) - alpha I
//   K(I) = (mu+mu')(1+rho I) + alpha
//   beta*N*(1+rho I) - K*(mu(1+rho I) + gamma*N) = 0
// gives a cubic whose coefficients are returned in ascending order (d, c, b, a).
template <class T, class P>
std::array<T, 4> equilibrium_cubic(const P& p) {
  const T one(1);
  const std::vector<T> lin{one, p.rho};  // 1 + rho I
  const T m = p.mu + p.mu_prime;
  std::vector<T> N = poly_mul<T>({p.lambda}, lin);
  N = poly_add<T>(N, poly_mul<T>({T(0), m}, lin), T(-1));
  N = poly_add<T>(N, {T(0), p.alpha}, T(-1));
  const std::vector<T> K{m + p.alpha, m * p.rho};
  const std::vector<T> lhs = poly_mul<T>(poly_mul<T>({p.beta}, N), lin);
  const std::vector<T> inner = poly_add<T>(poly_mul<T>({p.mu}, lin), N, p.gamma);
  const std::vector<T> F = poly_add<T>(lhs, poly_mul<T>(K, inner), T(-1));
  return {F[0], F[1], F[2], F[3]};
}

// Real roots of a*x^3 + b*x^2 + c*x + d by the trigonometric / Cardano
// formulas in long double. Returns sorted roots; a near-double root may
// appear twice or not at all.
inline std::vector<long double> cubic_real_roots(long double a, long double b, long double c,
                                                 long double d) {
  std::vector<long double> roots;
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double B = b / a, C = c / a, D = d / a;
  const long double p = C - B * B / 3.0L;
  const long double qq = 2.0L * B * B * B / 27.0L - B * C / 3.0L + D;
  const long double disc = qq * qq / 4.0L + p * p * p / 27.0L;
  if (disc > 0) {
    const long double s = std::sqrt(disc);
    roots.push_back(std::cbrt(-qq / 2.0L + s) + std::cbrt(-qq / 2.0L - s) - B / 3.0L);
  } else {
    const long double r = std::sqrt(-p / 3.0L);
    const long double arg = std::clamp(3.0L * qq / (2.0L * p * r), -1.0L, 1.0L);
    const long double phi = std::acos(arg) / 3.0L;
    for (int k = 0; k < 3; ++k) {
      roots.push_back(2.0L * r * std::cos(phi - 2.0L * pi * k / 3.0L) - B / 3.0L);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Sign-change scan plus bisection on (lo, hi]; misses double roots.
template <class F>
std::vector<double> bisection_roots(F f, double lo, double hi, int cells) {
  std::vector<double> roots;
  double x0 = lo, f0 = f(lo);
  for (int k = 1; k <= cells; ++k) {
    const double x1 = lo + (hi - lo) * k / cells;
    const double f1 = f(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if ((f0 < 0) != (f1 < 0) && f1 != 0.0) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

// -trace and determinant of the reduced Jacobian, written out term by term.
inline std::array<double, 2> trace_det_terms(const sirsat::ModelParams& p, double S, double I) {
  const double g = 1.0 + p.gamma * S, r = 1.0 + p.rho * I;
  const double P = 2 * p.mu + p.mu_prime + p.alpha / (r * r) + p.beta * I / (g * g) -
                   p.beta * S / g;
  const double Q = p.mu * p.mu + p.mu * p.mu_prime + p.mu * p.alpha / (r * r) +
                   (p.mu + p.mu_prime) * p.beta * I / (g * g) +
                   p.beta * p.alpha * I / (g * g * r * r) - p.mu * p.beta * S / g;
  return {P, Q};
}

// d(g f1)/dS + d(g f2)/dI with g = (1+gamma S)(1+rho I), by central differences.
inline double weighted_divergence(const sirsat::ModelParams& p, double S, double I) {
  const auto gf = [&](double s, double i) {
    const double g = (1.0 + p.gamma * s) * (1.0 + p.rho * i);
    const double inc = p.beta * s * i / (1.0 + p.gamma * s);
    return std::array<double, 2>{g * (p.lambda - p.mu * s - inc),
                                 g * (-(p.mu + p.mu_prime) * i + inc - p.alpha * i / (1.0 + p.rho * i))};
  };
  const double hs = 1e-4 * std::max(1.0, S), hi = 1e-4 * std::max(1.0, I);
  return (gf(S + hs, I)[0] - gf(S - hs, I)[0]) / (2 * hs) +
         (gf(S, I + hi)[1] - gf(S, I - hi)[1]) / (2 * hi);
}

inline double r0_direct(const sirsat::ModelParams& p) {
  // Next-generation: new infections F = beta*S0/(1+gamma*S0) at S0 = lambda/mu,
  // transitions V = mu + mu' + alpha (linearized recovery at I = 0).
  const double S0 = p.lambda / p.mu;
  return (p.beta * S0 / (1.0 + p.gamma * S0)) / (p.mu + p.mu_prime + p.alpha);
}

// Random parameter draws over broad, valid ranges.
class ParamSampler {
 public:
  explicit ParamSampler(std::uint64_t seed) : rng_(seed) {}

  sirsat::ModelParams operator()() {
    sirsat::ModelParams p;
    p.beta = log_uniform(1e-3, 0.5);
    p.lambda = log_uniform(0.5, 100.0);
    p.mu = log_uniform(1e-3, 0.2);
    p.mu_prime = log_uniform(1e-3, 0.5);
    p.alpha = log_uniform(1e-2, 1.0);
    p.rho = uniform(0.0, 1.0);
    p.gamma = uniform(0.0, 1.0);
    return p;
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
