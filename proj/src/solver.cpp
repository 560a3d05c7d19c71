#include "sirsat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dopri.hpp"
#include "sirsat/analysis.hpp"
#include "sirsat/error.hpp"

namespace sirsat {

namespace {

using detail::Vec;

struct FullField {
  ModelParams p;
  Vec<3> operator()(double, const Vec<3>& y) const {
    const double inc = detail::incidence(p, y[0], y[1]);
    const double rec = detail::recovery(p, y[1]);
    return {p.lambda - p.mu * y[0] - inc, -(p.mu + p.mu_prime) * y[1] + inc - rec,
            -p.mu * y[2] + rec};
  }
};

struct PlanarField {
  ModelParams p;
  double sign;
  Vec<2> operator()(double, const Vec<2>& y) const {
    const PlanarDerivative d = detail::planar_field(p, y[0], y[1]);
    return {sign * d.dS, sign * d.dI};
  }
};

void check_options(const IntegrationOptions& o) {
  if (!(o.rtol > 0.0) || !(o.atol > 0.0) || !std::isfinite(o.rtol) || !std::isfinite(o.atol)) {
    throw Error(ErrorKind::invalid_input, "rtol and atol must be finite and > 0");
  }
  if (!(o.max_step > 0.0)) throw Error(ErrorKind::invalid_input, "max_step must be > 0");
}

void check_init(const ModelParams& p, const State& s) {
  if (!in_domain(p, s, kDefaultDomainTol)) {
    throw Error(ErrorKind::invalid_input, "initial state lies outside the domain");
  }
}

// Integrates one constant-parameter piece [t0, t1], appending samples after
// the one at t0 (which the caller has already recorded).
void integrate_piece(const ModelParams& p, double t0, double t1, Vec<3>& y,
                     const IntegrationOptions& opts, Trajectory& traj) {
  detail::StepControl ctl;
  ctl.rtol = opts.rtol;
  ctl.atol = opts.atol;
  ctl.max_step = opts.max_step;
  auto dp = detail::make_dopri<3>(FullField{p}, ctl);

  std::vector<double> stops;
  for (double s : opts.stop_times) {
    if (s > t0 && s < t1) stops.push_back(s);
  }
  std::sort(stops.begin(), stops.end());
  stops.push_back(t1);

  const double domain_tol = 1e-6 * p.population_bound();
  auto observer = [&](double, const Vec<3>&, double t, Vec<3>& state) {
    for (double& v : state) {
      if (v < -opts.atol) {
        v = 0.0;
        traj.clamped = true;
      }
    }
    const State s{state[0], state[1], state[2]};
    if (!in_domain(p, s, domain_tol)) {
      throw Error(ErrorKind::domain, "trajectory left the invariant domain at t = " +
                                         std::to_string(t));
    }
    traj.samples.push_back({t, state[0], state[1], state[2]});
    return true;
  };

  double t = t0;
  for (double stop : stops) {
    if (stop <= t) continue;
    t = dp.run(t, y, stop, observer);
  }
  traj.accepted_steps += dp.counters().accepted;
  traj.rejected_steps += dp.counters().rejected;
}

}  // namespace

Trajectory integrate(const ModelParams& p, const State& init, double t_end,
                     const IntegrationOptions& opts) {
  p.validate();
  check_options(opts);
  check_init(p, init);
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorKind::invalid_input, "t_end must be finite and > 0");
  }
  Trajectory traj;
  traj.samples.push_back({0.0, init.S, init.I, init.R});
  Vec<3> y{init.S, init.I, init.R};
  integrate_piece(p, 0.0, t_end, y, opts, traj);
  traj.final_state = {y[0], y[1], y[2]};
  return traj;
}

GammaSchedule::GammaSchedule(std::vector<GammaSegment> segments, double t_end)
    : segments_(std::move(segments)), t_end_(t_end) {
  if (segments_.empty()) throw Error(ErrorKind::invalid_input, "schedule has no segments");
  if (segments_.front().t_start != 0.0) {
    throw Error(ErrorKind::invalid_input, "schedule must start at t = 0");
  }
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& s = segments_[k];
    if (!std::isfinite(s.t_start) || !std::isfinite(s.gamma) || s.gamma < 0.0 || s.gamma > 1.0) {
      throw Error(ErrorKind::invalid_input, "schedule segment has invalid values");
    }
    if (k > 0 && !(s.t_start > segments_[k - 1].t_start)) {
      throw Error(ErrorKind::invalid_input, "segment starts must be strictly increasing");
    }
  }
  if (!std::isfinite(t_end_) || !(t_end_ > segments_.back().t_start)) {
    throw Error(ErrorKind::invalid_input, "t_end must exceed the last segment start");
  }
}

double GammaSchedule::gamma_at(double t) const {
  double g = segments_.front().gamma;
  for (const auto& s : segments_) {
    if (s.t_start <= t) g = s.gamma;
  }
  return g;
}

double GammaSchedule::segment_end(std::size_t k) const {
  return k + 1 < segments_.size() ? segments_[k + 1].t_start : t_end_;
}

Trajectory integrate_schedule(const ModelParams& base, const GammaSchedule& sched,
                              const State& init, const IntegrationOptions& opts) {
  base.validate();
  check_options(opts);
  check_init(base, init);
  Trajectory traj;
  traj.samples.push_back({0.0, init.S, init.I, init.R});
  Vec<3> y{init.S, init.I, init.R};
  const auto& segs = sched.segments();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    integrate_piece(base.with_gamma(segs[k].gamma), segs[k].t_start, sched.segment_end(k), y,
                    opts, traj);
  }
  traj.final_state = {y[0], y[1], y[2]};
  return traj;
}

std::vector<State> phase_portrait_seeds(const ModelParams& p) {
  p.validate();
  const double n = p.lambda / p.mu;
  std::vector<State> seeds;
  for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) seeds.push_back({(1.0 - f) * n, f * n, 0.0});
  for (double f : {0.2, 0.6}) seeds.push_back({0.0, f * n, 0.0});
  seeds.push_back({0.5 * n, 1e-3, 0.0});
  return seeds;
}

std::vector<Trajectory> phase_portrait(const ModelParams& p, double t_end,
                                       const IntegrationOptions& opts) {
  std::vector<Trajectory> out;
  for (const State& s : phase_portrait_seeds(p)) out.push_back(integrate(p, s, t_end, opts));
  return out;
}

double LimitCycle::max_I() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& pt : points) m = std::max(m, pt[1]);
  return m;
}

double LimitCycle::min_I() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& pt : points) m = std::min(m, pt[1]);
  return m;
}

std::array<double, 2> flow_reduced(const ModelParams& p, std::array<double, 2> init,
                                   double duration, TimeDirection direction, double rtol,
                                   double atol) {
  const double sign = direction == TimeDirection::forward ? 1.0 : -1.0;
  auto dp = detail::make_dopri<2>(PlanarField{p, sign}, detail::StepControl{rtol, atol});
  Vec<2> y = init;
  if (duration > 0.0) {
    dp.run(0.0, y, duration, [](double, const Vec<2>&, double, Vec<2>&) { return true; });
  }
  return y;
}

std::optional<LimitCycle> detect_limit_cycle(const ModelParams& p, std::array<double, 2> init,
                                             TimeDirection direction, const CycleOptions& opts) {
  p.validate();
  const auto eqs = endemic_equilibria(p);
  if (eqs.empty()) {
    throw Error(ErrorKind::precondition, "no endemic equilibrium to anchor the section");
  }
  const double s1 = eqs.back().S;
  const double i1 = eqs.back().I;
  const double bound = p.population_bound();
  const double sign = direction == TimeDirection::forward ? 1.0 : -1.0;

  detail::StepControl ctl{opts.rtol, opts.atol};
  auto dp = detail::make_dopri<2>(PlanarField{p, sign}, ctl);

  struct Crossing {
    double t;
    double I;
  };
  std::vector<Crossing> crossings;
  bool converged = false;
  const double settle_tol = 1e-9 * (1.0 + std::abs(i1));

  auto observer = [&](double t_prev, const Vec<2>& y_prev, double t, Vec<2>& y) {
    if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || y[1] < opts.escape_I || y[0] < 0.0 ||
        y[0] + y[1] > bound * (1.0 + 1e-6)) {
      return false;
    }
    if (!(y_prev[0] - s1 < 0.0 && y[0] - s1 >= 0.0)) return true;

    // Locate the crossing by bisection on a single step from the step start.
    const double h = t - t_prev;
    double lo = 0.0;
    double hi = 1.0;
    Vec<2> at = y;
    while ((hi - lo) * h > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      const Vec<2> ym = dp.single_step(t_prev, y_prev, mid * h);
      if (ym[0] - s1 < 0.0) {
        lo = mid;
      } else {
        hi = mid;
        at = ym;
      }
    }
    crossings.push_back({t_prev + hi * h, at[1]});

    const std::size_t n = crossings.size();
    if (n < static_cast<std::size_t>(opts.burn_in) + 2) return true;
    const double ik = crossings[n - 1].I;
    const double amp = std::abs(ik - i1);
    if (amp < settle_tol) return false;  // collapsed onto the focus
    const double dk = std::abs(ik - crossings[n - 2].I);
    if (dk >= opts.return_tol * std::abs(ik)) return true;
    double ratio = 0.0;
    if (n >= 3) {
      const double dprev = std::abs(crossings[n - 2].I - crossings[n - 3].I);
      ratio = dprev > 0.0 ? std::min(dk / dprev, 0.999) : 0.0;
    }
    // A spiral onto e1 has amp ~ dk / (1 - ratio); a cycle keeps amp finite.
    if (amp > 10.0 * dk / (1.0 - ratio)) {
      converged = true;
      return false;
    }
    return true;
  };

  Vec<2> y = init;
  dp.run(0.0, y, opts.max_time, observer);
  if (!converged) return std::nullopt;

  const std::size_t n = crossings.size();
  LimitCycle cycle;
  cycle.gamma = p.gamma;
  cycle.period = crossings[n - 1].t - crossings[n - 2].t;
  cycle.stable = direction == TimeDirection::forward;
  cycle.section_S = s1;
  cycle.section_I = crossings[n - 1].I;

  detail::StepControl sample_ctl{opts.rtol, opts.atol, cycle.period * opts.max_step_fraction};
  auto sampler = detail::make_dopri<2>(PlanarField{p, sign}, sample_ctl);
  Vec<2> z{s1, cycle.section_I};
  cycle.points.push_back(z);
  sampler.run(0.0, z, cycle.period, [&](double, const Vec<2>&, double, Vec<2>& state) {
    cycle.points.push_back(state);
    return true;
  });
  return cycle;
}

}  // namespace sirsat
