#pragma once

#include <string>
#include <vector>

#include "sirsat/model.hpp"
#include "sirsat/solver.hpp"

namespace sirsat {

struct Checkpoint {
  std::string label;
  double t = 0.0;
  double I = 0.0;
  bool met = false;
};

struct ScenarioReport {
  Trajectory trajectory;
  std::vector<Checkpoint> checkpoints;
  bool hysteresis_verdict = false;

  bool all_met() const;
};

/// The thirteen-interval cautiousness schedule of the Indonesian narrative,
/// spanning [0, 4200).
GammaSchedule builtin_schedule();

/// Initial state of the narrative run: (100, 0.001, 0).
State builtin_initial_state();

/// Integrates the schedule and evaluates the narrative checkpoints that fall
/// inside its span:
///   I(199) < 0.1; I(599) within 2% of the endemic I at gamma = 0.1;
///   I(3599) > 60; at least two local maxima of I in [65, 78] on [3600, 4200)
///   and I confined to [65, 78] there after the first such maximum.
/// hysteresis_verdict is true when every applicable checkpoint is met.
ScenarioReport run_scenario(const ModelParams& p_base, const GammaSchedule& sched,
                            const State& init, const IntegrationOptions& opts = {});

struct HysteresisConfig {
  double leg_duration = 2000.0;
  // The gamma = 0.16 leg starts from a reseeded near-disease-free state and
  // grows at a rate of order 1e-3; it needs a longer window to settle.
  double reattack_duration = 10000.0;
  double reseed_I = 1e-3;
  double disease_free_I = 1e-3;
  double endemic_rel_tol = 0.02;
};

/// Runs the loop 0.3 -> 0.1 -> 0.33 -> 0.36 -> 0.17 -> 0.16 from (100, 0.001, 0)
/// and, as a side branch from the end of the 0.33 leg, the continuation that
/// holds gamma at 0.35 (below the cycle fold). One checkpoint per leg.
ScenarioReport run_hysteresis_demo(const ModelParams& p_base, const HysteresisConfig& cfg = {},
                                   const IntegrationOptions& opts = {});

}  // namespace sirsat
