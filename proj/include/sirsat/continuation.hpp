#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sirsat/analysis.hpp"
#include "sirsat/model.hpp"
#include "sirsat/solver.hpp"

namespace sirsat {

struct BranchPoint {
  double I = 0.0;
  double gamma = 0.0;
  double S = 0.0;
  StabilityClass stability = StabilityClass::nonhyperbolic;
};

enum class BifurcationKind { TR, SN, HB, HM, FLC };

std::string_view to_string(BifurcationKind k) noexcept;

struct BifurcationPoint {
  BifurcationKind kind = BifurcationKind::TR;
  double gamma = 0.0;
  // Equilibrium ordinate for TR/SN/HB; section ordinate of the relevant
  // cycle for HM/FLC.
  double I = 0.0;
  double R0 = 0.0;
};

struct CycleBranchPoint {
  double gamma = 0.0;
  bool present = false;  // false: detection failed or timed out at this gamma
  double period = 0.0;
  bool stable = true;
  double max_I = 0.0;
};

struct HopfResult {
  BifurcationPoint point;
  double Q = 0.0;             // determinant at the Hopf point, > 0
  double dP_dI = 0.0;         // along the equilibrium branch
  double dgamma_dI = 0.0;     // along the equilibrium branch
  double transversality = 0.0;  // d(-P/2)/dgamma, > 0 for a crossing
};

struct ContinuationConfig {
  double hopf_tol = 1e-10;            // in I
  double homoclinic_width = 1e-7;     // final bracket width in gamma
  double fold_width = 1e-6;           // final bracket width in gamma
  double manifold_offset = 1e-6;      // eigenvector offset, (S, I) units
  double near_focus_offset = 1.0;     // start offset from e1 for stable cycles
  double spiral_fraction = 0.3;       // spiral-in radius as a fraction of |e1 - e2|
  double shooting_max_time = 2e4;
  CycleOptions cycle;                 // forwarded to detect_limit_cycle
  unsigned threads = 0;               // 0 selects hardware concurrency
};

/// I^(s): the positive root of the admissibility quadratic; S_n > 0 iff I < I^(s).
double admissibility_limit(const ModelParams& p_base);

/// The cautiousness level at which I is an endemic ordinate.
/// Throws Error(singularity) for I >= I^(s) and Error(invalid_input) for I <= 0.
double gamma_of_I(const ModelParams& p_base, double I);

/// First and second derivatives of gamma_of_I.
double gamma_of_I_derivative(const ModelParams& p_base, double I);
double gamma_of_I_second_derivative(const ModelParams& p_base, double I);

/// P = -trace(J) at the branch point with ordinate I, and its total
/// derivative along the branch.
double branch_trace(const ModelParams& p_base, double I);
double branch_trace_derivative(const ModelParams& p_base, double I);

std::vector<BranchPoint> equilibrium_branch(const ModelParams& p_base, double I_min,
                                            double I_max, std::size_t steps);

BifurcationPoint locate_transcritical(const ModelParams& p_base);
BifurcationPoint locate_saddle_node(const ModelParams& p_base);
HopfResult locate_hopf(const ModelParams& p_base, const ContinuationConfig& cfg = {});

/// Endemic focus e1 (largest I) and saddle e2 at p; nullopt for e2 when absent.
struct EndemicPair {
  std::array<double, 2> e1{};
  std::optional<std::array<double, 2>> e2;
};
EndemicPair endemic_pair(const ModelParams& p);

enum class ManifoldFate { captured, escaped, undecided };

std::string_view to_string(ManifoldFate f) noexcept;

/// Follows the branch of the saddle's unstable manifold that heads toward
/// e1 and reports whether it spirals in (captured) or runs to the
/// disease-free state (escaped).
ManifoldFate shoot_unstable_manifold(const ModelParams& p, const ContinuationConfig& cfg = {});

/// Forward-time cycle search from a start near e1.
std::optional<LimitCycle> find_stable_cycle(const ModelParams& p,
                                            const ContinuationConfig& cfg = {});

/// Reversed-time cycle search from the inner branch of the saddle's
/// stable manifold; both eigenvector signs are tried.
std::optional<LimitCycle> find_unstable_cycle(const ModelParams& p,
                                              const ContinuationConfig& cfg = {});

BifurcationPoint locate_homoclinic(const ModelParams& p_base, double gamma_hopf,
                                   double gamma_sn, const ContinuationConfig& cfg = {});
BifurcationPoint locate_cycle_fold(const ModelParams& p_base, double gamma_hm, double gamma_sn,
                                   const ContinuationConfig& cfg = {});

/// Stable row for every grid point (present or not) followed by an
/// unstable row where one was found, ordered by grid index.
std::vector<CycleBranchPoint> trace_cycle_branch(const ModelParams& p_base, double gamma_lo,
                                                 double gamma_hi, std::size_t steps,
                                                 const ContinuationConfig& cfg = {});

struct BifurcationSet {
  BifurcationPoint tr;
  HopfResult hb;
  BifurcationPoint hm;
  BifurcationPoint flc;
  BifurcationPoint sn;

  /// TR, HB, HM, FLC, SN.
  std::vector<BifurcationPoint> ordered() const;
};

BifurcationSet locate_bifurcations(const ModelParams& p_base, const ContinuationConfig& cfg = {});

struct RegimeInfo {
  std::string id;  // "I" .. "X"
  StabilityClass dfe = StabilityClass::nonhyperbolic;
  int endemic_stable = 0;
  int endemic_unstable = 0;
  int endemic_semistable = 0;
  int cycles_stable = 0;
  int cycles_unstable = 0;
  int cycles_semistable = 0;
  int homoclinic_orbits = 0;

  int endemic_total() const { return endemic_stable + endemic_unstable + endemic_semistable; }
  int cycles_total() const {
    return cycles_stable + cycles_unstable + cycles_semistable + homoclinic_orbits;
  }
};

/// Boundary values are matched with an absolute tolerance of `equal_tol`.
RegimeInfo classify_regime(const BifurcationSet& set, double gamma, double equal_tol = 1e-9);

}  // namespace sirsat
