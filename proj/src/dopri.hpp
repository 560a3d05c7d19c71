#pragma once

// Dormand-Prince 5(4) embedded pair with PI step-size control.
// Private to the library; the public surface lives in sirsat/solver.hpp.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "sirsat/error.hpp"

namespace sirsat::detail {

template <std::size_t N>
using Vec = std::array<double, N>;

struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects automatically
};

struct StepCounters {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

template <std::size_t N, class Field>
class DormandPrince {
 public:
  DormandPrince(Field field, StepControl control) : f_(std::move(field)), ctl_(control) {}

  /// One unchecked step of size h from (t, y), fifth-order solution.
  Vec<N> single_step(double t, const Vec<N>& y, double h) const {
    Vec<N> k1 = f_(t, y);
    Vec<N> out;
    Vec<N> err;
    stages(t, y, h, k1, out, err);
    return out;
  }

  /// Integrates from t0 to t1 (t1 > t0). After every accepted step,
  /// observer(t_prev, y_prev, t, y) is called; it may modify y and returns
  /// false to stop early. Returns the time reached.
  template <class Observer>
  double run(double t0, Vec<N>& y, double t1, Observer&& observer) {
    const double span = t1 - t0;
    double t = t0;
    double h = next_h_ > 0.0 ? next_h_
               : ctl_.initial_step > 0.0 ? ctl_.initial_step
                                         : initial_step(t, y, span);
    h = std::min({h, span, ctl_.max_step});
    Vec<N> k1 = f_(t, y);
    double err_prev = 1e-4;
    const double h_min = 1e-14 * std::max(std::abs(t1), span);

    while (t < t1) {
      bool last = false;
      double h_try = h;
      if (t + h_try >= t1 || t1 - (t + h_try) < 1e-12 * span) {
        h_try = t1 - t;
        last = true;
      }
      if (h_try < h_min && !last) {
        throw Error(ErrorKind::stiffness, "step size underflow");
      }
      Vec<N> y_new;
      Vec<N> err_vec;
      stages(t, y, h_try, k1, y_new, err_vec);
      const double err = error_norm(y, y_new, err_vec);

      if (!std::isfinite(err)) {
        ++counters_.rejected;
        h = 0.25 * h_try;
        if (h < h_min) throw Error(ErrorKind::stiffness, "non-finite step error");
        continue;
      }

      if (err <= 1.0) {
        const double t_prev = t;
        const Vec<N> y_prev = y;
        t = last ? t1 : t + h_try;
        y = y_new;
        ++counters_.accepted;
        // PI controller (Hairer & Wanner, DOPRI5 defaults).
        const double e = std::max(err, 1e-10);
        double fac = std::pow(e, 0.17) / std::pow(err_prev, 0.04) / 0.9;
        fac = std::clamp(fac, 1.0 / 10.0, 5.0);
        const double h_next = std::min(h_try / fac, ctl_.max_step);
        err_prev = e;
        // Keep the unclipped proposal when the step was shortened to land on t1.
        h = last ? std::max(h, h_next) : h_next;
        next_h_ = h;
        const bool keep_going = observer(t_prev, y_prev, t, y);
        k1 = f_(t, y);
        if (!keep_going) return t;
      } else {
        ++counters_.rejected;
        const double fac = std::clamp(std::pow(err, 0.2) / 0.9, 1.0, 10.0);
        h = h_try / fac;
        if (h < h_min) throw Error(ErrorKind::stiffness, "step size underflow");
      }
    }
    return t;
  }

  const StepCounters& counters() const { return counters_; }

  /// Step size carried into the next run() call; 0 resets the controller.
  void set_next_step(double h) { next_h_ = h; }

 private:
  // Butcher tableau.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  void stages(double t, const Vec<N>& y, double h, const Vec<N>& k1, Vec<N>& out,
              Vec<N>& err) const {
    Vec<N> tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    const Vec<N> k2 = f_(t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const Vec<N> k3 = f_(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const Vec<N> k4 = f_(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const Vec<N> k5 = f_(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const Vec<N> k6 = f_(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const Vec<N> k7 = f_(t + h, out);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }

  double error_norm(const Vec<N>& y, const Vec<N>& y_new, const Vec<N>& err) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl_.atol + ctl_.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double r = err[i] / sc;
      sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(N));
  }

  double initial_step(double t, const Vec<N>& y, double span) const {
    const Vec<N> f0 = f_(t, y);
    double d0 = 0.0;
    double d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl_.atol + ctl_.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Vec<N> y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h0 * f0[i];
    const Vec<N> f1 = f_(t + h0, y1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl_.atol + ctl_.rtol * std::abs(y[i]);
      d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min(100.0 * h0, h1);
  }

  Field f_;
  StepControl ctl_;
  StepCounters counters_;
  double next_h_ = 0.0;
};

template <std::size_t N, class Field>
DormandPrince<N, Field> make_dopri(Field field, StepControl control) {
  return DormandPrince<N, Field>(std::move(field), control);
}

}  // namespace sirsat::detail
