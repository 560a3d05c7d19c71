#include "sirsat/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "sirsat/analysis.hpp"
#include "sirsat/error.hpp"

namespace sirsat {

namespace {

constexpr double kCheckDiseaseFree = 199.0;
constexpr double kCheckPandemic = 599.0;
constexpr double kCheckEarlyEffort = 3599.0;
constexpr double kWindowStart = 3600.0;
constexpr double kWindowEnd = 4200.0;
constexpr double kBandLow = 65.0;
constexpr double kBandHigh = 78.0;

double endemic_I(const ModelParams& p) {
  const auto eqs = endemic_equilibria(p);
  if (eqs.empty()) throw Error(ErrorKind::precondition, "no endemic equilibrium");
  return eqs.back().I;
}

double I_at(const Trajectory& traj, double t) {
  auto it = std::lower_bound(traj.samples.begin(), traj.samples.end(), t,
                             [](const Sample& s, double v) { return s.t < v; });
  if (it == traj.samples.end()) return traj.samples.back().I;
  if (it->t == t || it == traj.samples.begin()) return it->I;
  const Sample& b = *it;
  const Sample& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return a.I + w * (b.I - a.I);
}

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

Checkpoint band_checkpoint(const Trajectory& traj) {
  std::vector<const Sample*> window;
  for (const Sample& s : traj.samples) {
    if (s.t >= kWindowStart && s.t < kWindowEnd) window.push_back(&s);
  }
  Checkpoint c{"cycle regime: oscillation in [65, 78] on [3600, 4200)", kWindowStart, 0.0, false};
  int maxima = 0;
  std::size_t first = window.size();
  for (std::size_t k = 1; k + 1 < window.size(); ++k) {
    const double i = window[k]->I;
    if (i > window[k - 1]->I && i >= window[k + 1]->I && i >= kBandLow && i <= kBandHigh) {
      if (maxima++ == 0) first = k;
    }
  }
  bool confined = first < window.size();
  for (std::size_t k = first; k < window.size(); ++k) {
    if (window[k]->I < kBandLow || window[k]->I > kBandHigh) confined = false;
  }
  for (const Sample* s : window) c.I = std::max(c.I, s->I);
  c.met = maxima >= 2 && confined;
  return c;
}

}  // namespace

bool ScenarioReport::all_met() const {
  return std::all_of(checkpoints.begin(), checkpoints.end(),
                     [](const Checkpoint& c) { return c.met; });
}

GammaSchedule builtin_schedule() {
  return GammaSchedule({{0, 0.3},
                        {200, 0.1},
                        {600, 0.33},
                        {800, 0.32},
                        {1200, 0.31},
                        {1800, 0.315},
                        {2000, 0.305},
                        {2400, 0.32},
                        {2800, 0.31},
                        {3200, 0.305},
                        {3400, 0.34},
                        {3600, 0.3497},
                        {4000, 0.35}},
                       4200.0);
}

State builtin_initial_state() { return {100.0, 0.001, 0.0}; }

ScenarioReport run_scenario(const ModelParams& p_base, const GammaSchedule& sched,
                            const State& init, const IntegrationOptions& opts) {
  IntegrationOptions o = opts;
  const double t_end = sched.t_end();
  for (double t : {kCheckDiseaseFree, kCheckPandemic, kCheckEarlyEffort}) {
    if (t < t_end) o.stop_times.push_back(t);
  }
  ScenarioReport r;
  r.trajectory = integrate_schedule(p_base, sched, init, o);
  const Trajectory& tr = r.trajectory;

  if (kCheckDiseaseFree < t_end) {
    const double i = I_at(tr, kCheckDiseaseFree);
    r.checkpoints.push_back({"disease-free beginning: I(199) < 0.1", kCheckDiseaseFree, i, i < 0.1});
  }
  if (kCheckPandemic < t_end) {
    const double i = I_at(tr, kCheckPandemic);
    const double target = endemic_I(p_base.with_gamma(0.1));
    r.checkpoints.push_back({"start of the pandemic: I(599) within 2% of endemic I at gamma=0.1",
                             kCheckPandemic, i, within(i, target, 0.02)});
  }
  if (kCheckEarlyEffort < t_end) {
    const double i = I_at(tr, kCheckEarlyEffort);
    r.checkpoints.push_back(
        {"early effort fails to eradicate: I(3599) > 60", kCheckEarlyEffort, i, i > 60.0});
  }
  if (kWindowEnd <= t_end) r.checkpoints.push_back(band_checkpoint(tr));
  r.hysteresis_verdict = r.all_met();
  return r;
}

ScenarioReport run_hysteresis_demo(const ModelParams& p_base, const HysteresisConfig& cfg,
                                   const IntegrationOptions& opts) {
  p_base.validate();
  ScenarioReport r;
  Trajectory& tr = r.trajectory;
  State state = builtin_initial_state();
  double t0 = 0.0;
  tr.samples.push_back({0.0, state.S, state.I, state.R});

  auto run_leg = [&](double gamma, double duration, const State& from) {
    const Trajectory leg = integrate(p_base.with_gamma(gamma), from, duration, opts);
    for (std::size_t k = 1; k < leg.samples.size(); ++k) {
      Sample s = leg.samples[k];
      s.t += t0;
      tr.samples.push_back(s);
    }
    tr.accepted_steps += leg.accepted_steps;
    tr.rejected_steps += leg.rejected_steps;
    tr.clamped = tr.clamped || leg.clamped;
    t0 += duration;
    return leg.final_state;
  };
  auto reseed = [&](State s) {
    const double add = cfg.reseed_I - s.I;
    if (add > 0.0) {
      s.S -= add;
      s.I = cfg.reseed_I;
    }
    return s;
  };
  auto disease_free = [&](std::string label, const State& s) {
    r.checkpoints.push_back({std::move(label), t0, s.I, s.I < cfg.disease_free_I});
  };
  auto endemic = [&](std::string label, double gamma, const State& s) {
    const double target = endemic_I(p_base.with_gamma(gamma));
    r.checkpoints.push_back({std::move(label), t0, s.I, within(s.I, target, cfg.endemic_rel_tol)});
  };

  state = run_leg(0.3, cfg.leg_duration, state);
  disease_free("leg 1: gamma=0.3 from near disease-free stays disease-free", state);

  state = run_leg(0.1, cfg.leg_duration, state);
  endemic("leg 2: gamma=0.1 drives the system endemic", 0.1, state);

  state = run_leg(0.33, cfg.leg_duration, state);
  endemic("leg 3: gamma=0.33 remains endemic (bistability)", 0.33, state);
  const State after_leg3 = state;

  {
    const Trajectory side =
        integrate(p_base.with_gamma(0.35), after_leg3, cfg.leg_duration, opts);
    double min_I = side.samples.front().I;
    for (const Sample& s : side.samples) {
      if (s.t >= 0.5 * cfg.leg_duration) min_I = std::min(min_I, s.I);
    }
    r.checkpoints.push_back({"branch: gamma held at 0.35 below the cycle fold stays endemic",
                             t0 + cfg.leg_duration, side.final_state.I, min_I > 60.0});
  }

  state = run_leg(0.36, cfg.leg_duration, state);
  disease_free("leg 4: gamma=0.36 above the cycle fold returns to disease-free", state);

  state = run_leg(0.17, cfg.leg_duration, reseed(state));
  disease_free("leg 5: gamma=0.17 with reintroduced infection stays disease-free", state);

  state = run_leg(0.16, cfg.reattack_duration, reseed(state));
  endemic("leg 6: gamma=0.16 with reintroduced infection turns endemic", 0.16, state);

  tr.final_state = state;
  r.hysteresis_verdict = r.all_met();
  return r;
}

}  // namespace sirsat
