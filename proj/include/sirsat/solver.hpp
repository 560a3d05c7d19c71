#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "sirsat/model.hpp"

namespace sirsat {

struct Sample {
  double t = 0.0;
  double S = 0.0;
  double I = 0.0;
  double R = 0.0;
};

struct Trajectory {
  std::vector<Sample> samples;  // t strictly increasing
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  // Set when a negative undershoot below -atol was clamped to zero.
  bool clamped = false;
  State final_state;
};

struct IntegrationOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  // Times (inside the integration span) the integrator must land on exactly.
  std::vector<double> stop_times;
};

/// Adaptive Dormand-Prince 5(4) solution of the full model on [0, t_end].
/// Throws Error(stiffness) on step-size underflow and Error(domain) when a
/// sample leaves the invariant domain by more than 1e-6 * lambda/mu.
Trajectory integrate(const ModelParams& p, const State& init, double t_end,
                     const IntegrationOptions& opts = {});

struct GammaSegment {
  double t_start = 0.0;
  double gamma = 0.0;
};

/// Piecewise-constant cautiousness level over [0, t_end).
class GammaSchedule {
 public:
  GammaSchedule(std::vector<GammaSegment> segments, double t_end);

  const std::vector<GammaSegment>& segments() const { return segments_; }
  double t_end() const { return t_end_; }
  double gamma_at(double t) const;
  /// End time of segment k (the next start, or t_end).
  double segment_end(std::size_t k) const;

 private:
  std::vector<GammaSegment> segments_;
  double t_end_;
};

/// Integrates segment by segment, restarting the step controller at every
/// segment start. The state is carried across boundaries unchanged.
Trajectory integrate_schedule(const ModelParams& base, const GammaSchedule& sched,
                              const State& init, const IntegrationOptions& opts = {});

/// Default phase-portrait starting points, all with R = 0: five on the edge
/// S + I = lambda/mu, two on the edge S = 0, and one just above the invariant
/// axis I = 0 (I = 1e-3).
std::vector<State> phase_portrait_seeds(const ModelParams& p);

/// One trajectory per entry of phase_portrait_seeds(p), each on [0, t_end].
std::vector<Trajectory> phase_portrait(const ModelParams& p, double t_end,
                                       const IntegrationOptions& opts = {});

enum class TimeDirection { forward, reversed };

struct LimitCycle {
  double gamma = 0.0;
  std::vector<std::array<double, 2>> points;  // (S, I) over one period
  double period = 0.0;
  bool stable = false;
  double section_S = 0.0;  // section coordinate S = S(e1)
  double section_I = 0.0;  // converged return point on the section

  double max_I() const;
  double min_I() const;
};

struct CycleOptions {
  double max_time = 2e5;
  int burn_in = 10;            // section crossings discarded before testing
  double return_tol = 1e-8;    // relative, between successive return points
  double rtol = 1e-10;
  double atol = 1e-10;
  double escape_I = 1e-3;      // below this the orbit is heading to the DFE
  double max_step_fraction = 1.0 / 200.0;  // of the period, when sampling the loop
};

/// Poincare-section search for a limit cycle of the reduced system around
/// the endemic focus e1 (the endemic equilibrium with the largest I).
/// Reversed time turns an unstable planar cycle into an attracting one.
/// Returns nullopt when the orbit escapes, settles on an equilibrium, or
/// does not converge within max_time. Throws Error(precondition) if no
/// endemic equilibrium exists.
std::optional<LimitCycle> detect_limit_cycle(const ModelParams& p, std::array<double, 2> init,
                                             TimeDirection direction,
                                             const CycleOptions& opts = {});

/// Integrates the reduced system for a fixed time and returns the end point.
std::array<double, 2> flow_reduced(const ModelParams& p, std::array<double, 2> init,
                                   double duration, TimeDirection direction,
                                   double rtol = 1e-10, double atol = 1e-10);

}  // namespace sirsat
