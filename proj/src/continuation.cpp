#include "sirsat/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "dopri.hpp"
#include "sirsat/error.hpp"

namespace sirsat {

namespace {

using detail::Vec;

struct Recovery {
  double D;   // alpha/(1+rho I) + mu + mu'
  double Dp;  // dD/dI
  double Dpp;
};

Recovery recovery_terms(const ModelParams& p, double I) {
  const double ri = 1.0 + p.rho * I;
  return {p.alpha / ri + p.mu + p.mu_prime, -p.alpha * p.rho / (ri * ri),
          2.0 * p.alpha * p.rho * p.rho / (ri * ri * ri)};
}

void require_positive_I(double I) {
  if (!(I > 0.0) || !std::isfinite(I)) {
    throw Error(ErrorKind::invalid_input, "branch ordinate I must be finite and > 0");
  }
}

// lambda - I*D(I) = mu * S_n(I).
double admissible_margin(const ModelParams& p, double I) {
  return p.lambda - I * recovery_terms(p, I).D;
}

double golden_max(const ModelParams& p, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = gamma_of_I(p, x1);
  double f2 = gamma_of_I(p, x2);
  while (hi - lo > 1e-7 * std::max(1.0, hi)) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = gamma_of_I(p, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = gamma_of_I(p, x1);
    }
  }
  return 0.5 * (lo + hi);
}

struct PlanarRhs {
  ModelParams p;
  double sign;
  Vec<2> operator()(double, const Vec<2>& y) const {
    const PlanarDerivative d = detail::planar_field(p, y[0], y[1]);
    return {sign * d.dS, sign * d.dI};
  }
};

struct SaddleDirections {
  Eigen::Vector2d unstable;
  Eigen::Vector2d stable;
};

SaddleDirections saddle_directions(const ModelParams& p, const std::array<double, 2>& e2) {
  const Eigen::Matrix2d j = jacobian_reduced(p, e2[0], e2[1]);
  Eigen::EigenSolver<Eigen::Matrix2d> es(j);
  const auto vals = es.eigenvalues();
  const auto vecs = es.eigenvectors();
  if (std::abs(vals[0].imag()) > 0.0 || vals[0].real() * vals[1].real() >= 0.0) {
    throw Error(ErrorKind::precondition, "e2 is not a saddle");
  }
  const int iu = vals[0].real() > 0.0 ? 0 : 1;
  SaddleDirections d;
  d.unstable = vecs.col(iu).real().normalized();
  d.stable = vecs.col(1 - iu).real().normalized();
  return d;
}

struct ShotResult {
  ManifoldFate fate = ManifoldFate::undecided;
  double first_section_I = 0.0;
};

ShotResult shoot(const ModelParams& p, const ContinuationConfig& cfg) {
  const EndemicPair pair = endemic_pair(p);
  if (!pair.e2) throw Error(ErrorKind::precondition, "no saddle equilibrium e2");
  const auto& e1 = pair.e1;
  const auto& e2 = *pair.e2;
  Eigen::Vector2d v = saddle_directions(p, e2).unstable;
  const Eigen::Vector2d gap(e1[0] - e2[0], e1[1] - e2[1]);
  if (v.dot(gap) < 0.0) v = -v;
  const double radius = cfg.spiral_fraction * gap.norm();

  auto dp = detail::make_dopri<2>(PlanarRhs{p, 1.0}, detail::StepControl{1e-10, 1e-12});
  Vec<2> y{e2[0] + cfg.manifold_offset * v[0], e2[1] + cfg.manifold_offset * v[1]};
  ShotResult out;
  int crossings = 0;
  dp.run(0.0, y, cfg.shooting_max_time,
         [&](double, const Vec<2>& prev, double, Vec<2>& cur) {
           if (cur[1] < cfg.cycle.escape_I) {
             out.fate = ManifoldFate::escaped;
             return false;
           }
           if (prev[0] < e1[0] && cur[0] >= e1[0]) {
             const double w = (e1[0] - prev[0]) / (cur[0] - prev[0]);
             const double i_cross = prev[1] + w * (cur[1] - prev[1]);
             if (++crossings == 1) {
               out.first_section_I = i_cross;
             } else if (std::abs(i_cross - e1[1]) < radius) {
               out.fate = ManifoldFate::captured;
               return false;
             }
           }
           return true;
         });
  return out;
}

std::string bracket_message(std::string_view what, double lo, double hi) {
  std::ostringstream os;
  os.precision(12);
  os << what << " (bracket [" << lo << ", " << hi << "])";
  return os.str();
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

std::string_view to_string(BifurcationKind k) noexcept {
  switch (k) {
    case BifurcationKind::TR: return "TR";
    case BifurcationKind::SN: return "SN";
    case BifurcationKind::HB: return "HB";
    case BifurcationKind::HM: return "HM";
    case BifurcationKind::FLC: return "FLC";
  }
  return "?";
}

std::string_view to_string(ManifoldFate f) noexcept {
  switch (f) {
    case ManifoldFate::captured: return "captured";
    case ManifoldFate::escaped: return "escaped";
    case ManifoldFate::undecided: return "undecided";
  }
  return "?";
}

double admissibility_limit(const ModelParams& p) {
  p.validate();
  const double a2 = -(p.mu + p.mu_prime) * p.rho;
  const double a1 = p.lambda * p.rho - p.alpha - p.mu - p.mu_prime;
  const double a0 = p.lambda;
  if (a2 == 0.0) return -a0 / a1;
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
  const double r1 = q / a2;
  const double r2 = a0 / q;
  return std::max(r1, r2);
}

double gamma_of_I(const ModelParams& p, double I) {
  require_positive_I(I);
  const Recovery r = recovery_terms(p, I);
  const double margin = p.lambda - I * r.D;
  if (!(margin > 1e-14 * p.lambda)) {
    throw Error(ErrorKind::singularity, "I is at or beyond the admissibility limit");
  }
  // The equilibrium condition (1 + gamma*S) D = beta*S has gamma-coefficient S*D.
  const double S = margin / p.mu;
  if (!(S * r.D > 0.0)) throw Error(ErrorKind::degenerate, "gamma coefficient vanishes");
  return p.beta / r.D - 1.0 / S;
}

double gamma_of_I_derivative(const ModelParams& p, double I) {
  require_positive_I(I);
  const Recovery r = recovery_terms(p, I);
  const double margin = p.lambda - I * r.D;
  if (!(margin > 0.0)) throw Error(ErrorKind::singularity, "I beyond the admissibility limit");
  const double gp = r.D + I * r.Dp;
  return -p.beta * r.Dp / (r.D * r.D) - p.mu * gp / (margin * margin);
}

double gamma_of_I_second_derivative(const ModelParams& p, double I) {
  require_positive_I(I);
  const Recovery r = recovery_terms(p, I);
  const double margin = p.lambda - I * r.D;
  if (!(margin > 0.0)) throw Error(ErrorKind::singularity, "I beyond the admissibility limit");
  const double gp = r.D + I * r.Dp;
  const double gpp = 2.0 * r.Dp + I * r.Dpp;
  return -p.beta * (r.Dpp / (r.D * r.D) - 2.0 * r.Dp * r.Dp / (r.D * r.D * r.D)) -
         p.mu * (gpp / (margin * margin) + 2.0 * gp * gp / (margin * margin * margin));
}

double branch_trace(const ModelParams& p, double I) {
  const double g = gamma_of_I(p, I);
  const double S = admissible_margin(p, I) / p.mu;
  return trace_det(p.with_gamma(g), S, I).P;
}

double branch_trace_derivative(const ModelParams& p, double I) {
  const double h = 1e-4 * std::max(1.0, std::abs(I));
  return (-branch_trace(p, I + 2 * h) + 8 * branch_trace(p, I + h) - 8 * branch_trace(p, I - h) +
          branch_trace(p, I - 2 * h)) /
         (12.0 * h);
}

std::vector<BranchPoint> equilibrium_branch(const ModelParams& p, double I_min, double I_max,
                                            std::size_t steps) {
  p.validate();
  if (steps < 2) throw Error(ErrorKind::invalid_input, "branch needs at least 2 steps");
  if (!(I_min > 0.0) || !(I_max > I_min)) {
    throw Error(ErrorKind::invalid_input, "branch requires 0 < I_min < I_max");
  }
  if (!(I_max < admissibility_limit(p))) {
    throw Error(ErrorKind::singularity, "I_max is at or beyond the admissibility limit");
  }
  std::vector<BranchPoint> out;
  out.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double I = I_min + (I_max - I_min) * static_cast<double>(k) / (steps - 1);
    BranchPoint b;
    b.I = I;
    b.gamma = gamma_of_I(p, I);
    b.S = endemic_susceptible(p, I);
    b.stability = classify_equilibrium(p.with_gamma(b.gamma), b.S, I);
    out.push_back(b);
  }
  return out;
}

BifurcationPoint locate_transcritical(const ModelParams& p) {
  p.validate();
  const double m = p.mu + p.mu_prime + p.alpha;
  const double g = (p.beta * p.lambda / m - p.mu) / p.lambda;
  if (!(g >= 0.0 && g <= 1.0)) {
    throw Error(ErrorKind::out_of_range, "R0 = 1 has no solution with gamma in [0, 1]");
  }
  return {BifurcationKind::TR, g, 0.0, basic_reproduction_number(p.with_gamma(g))};
}

BifurcationPoint locate_saddle_node(const ModelParams& p) {
  p.validate();
  const double is = admissibility_limit(p);
  constexpr int kGrid = 4000;
  const double h = is / kGrid;
  int best = 1;
  double best_g = gamma_of_I(p, h);
  for (int k = 2; k < kGrid; ++k) {
    const double g = gamma_of_I(p, k * h);
    if (g > best_g) {
      best_g = g;
      best = k;
    }
  }
  if (best <= 1 || best >= kGrid - 1) {
    throw Error(ErrorKind::structure, "gamma(I) has no interior maximum");
  }
  double I = golden_max(p, (best - 1) * h, (best + 1) * h);
  for (int it = 0; it < 50; ++it) {
    const double step = gamma_of_I_derivative(p, I) / gamma_of_I_second_derivative(p, I);
    I -= step;
    if (std::abs(step) <= 1e-15 * I) break;
  }
  const double g = gamma_of_I(p, I);
  if (!(g >= 0.0 && g <= 1.0)) {
    throw Error(ErrorKind::out_of_range, "saddle-node lies outside gamma in [0, 1]");
  }
  return {BifurcationKind::SN, g, I, basic_reproduction_number(p.with_gamma(g))};
}

HopfResult locate_hopf(const ModelParams& p, const ContinuationConfig& cfg) {
  p.validate();
  const double is = admissibility_limit(p);
  double lo_bound = 0.0;
  try {
    lo_bound = locate_saddle_node(p).I;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::structure) throw;
  }
  constexpr int kGrid = 2000;
  const double top = is * (1.0 - 1e-9);
  const double h = (top - lo_bound) / kGrid;
  double a = 0.0;
  double b = 0.0;
  bool found = false;
  double prev_I = top;
  double prev_P = branch_trace(p, prev_I);
  for (int k = kGrid - 1; k >= 1; --k) {
    const double I = lo_bound + k * h;
    const double P = branch_trace(p, I);
    if ((P > 0.0) != (prev_P > 0.0)) {
      a = I;
      b = prev_I;
      found = true;
      break;
    }
    prev_I = I;
    prev_P = P;
  }
  if (!found) throw Error(ErrorKind::absent_hopf, "trace does not change sign on the branch");

  double pa = branch_trace(p, a);
  while (b - a > 1e-6) {
    const double m = 0.5 * (a + b);
    const double pm = branch_trace(p, m);
    if ((pm > 0.0) == (pa > 0.0)) {
      a = m;
      pa = pm;
    } else {
      b = m;
    }
  }
  double I = 0.5 * (a + b);
  for (int it = 0; it < 30; ++it) {
    const double step = branch_trace(p, I) / branch_trace_derivative(p, I);
    I -= step;
    if (std::abs(step) <= cfg.hopf_tol) break;
  }

  HopfResult r;
  const double g = gamma_of_I(p, I);
  const ModelParams pg = p.with_gamma(g);
  r.point = {BifurcationKind::HB, g, I, basic_reproduction_number(pg)};
  r.Q = trace_det(pg, endemic_susceptible(p, I), I).Q;
  if (!(r.Q > 0.0)) throw Error(ErrorKind::absent_hopf, "determinant is not positive at P = 0");
  r.dP_dI = branch_trace_derivative(p, I);
  r.dgamma_dI = gamma_of_I_derivative(p, I);
  r.transversality = -0.5 * r.dP_dI / r.dgamma_dI;
  return r;
}

EndemicPair endemic_pair(const ModelParams& p) {
  const auto eqs = endemic_equilibria(p);
  if (eqs.empty()) throw Error(ErrorKind::precondition, "no endemic equilibrium");
  EndemicPair out;
  out.e1 = {eqs.back().S, eqs.back().I};
  if (eqs.size() >= 2) {
    const auto& e = eqs[eqs.size() - 2];
    out.e2 = std::array<double, 2>{e.S, e.I};
  }
  return out;
}

ManifoldFate shoot_unstable_manifold(const ModelParams& p, const ContinuationConfig& cfg) {
  p.validate();
  return shoot(p, cfg).fate;
}

std::optional<LimitCycle> find_stable_cycle(const ModelParams& p, const ContinuationConfig& cfg) {
  p.validate();
  const auto eqs = endemic_equilibria(p);
  if (eqs.empty()) return std::nullopt;
  const std::array<double, 2> init{eqs.back().S, eqs.back().I + cfg.near_focus_offset};
  return detect_limit_cycle(p, init, TimeDirection::forward, cfg.cycle);
}

std::optional<LimitCycle> find_unstable_cycle(const ModelParams& p,
                                              const ContinuationConfig& cfg) {
  p.validate();
  const auto eqs = endemic_equilibria(p);
  if (eqs.size() < 2) return std::nullopt;
  const EndemicPair pair = endemic_pair(p);
  const auto& e2 = *pair.e2;
  const Eigen::Vector2d w = saddle_directions(p, e2).stable;
  for (double sign : {1.0, -1.0}) {
    const std::array<double, 2> init{e2[0] + sign * cfg.manifold_offset * w[0],
                                     e2[1] + sign * cfg.manifold_offset * w[1]};
    auto c = detect_limit_cycle(p, init, TimeDirection::reversed, cfg.cycle);
    if (c) return c;
  }
  return std::nullopt;
}

BifurcationPoint locate_homoclinic(const ModelParams& p, double gamma_hopf, double gamma_sn,
                                   const ContinuationConfig& cfg) {
  p.validate();
  double lo = gamma_hopf + 1e-3 * (gamma_sn - gamma_hopf);
  double hi = gamma_hopf + 0.5 * (gamma_sn - gamma_hopf);
  const ShotResult at_lo = shoot(p.with_gamma(lo), cfg);
  const ShotResult at_hi = shoot(p.with_gamma(hi), cfg);
  if (at_lo.fate != ManifoldFate::captured || at_hi.fate != ManifoldFate::escaped) {
    throw Error(ErrorKind::detection,
                bracket_message(std::string("homoclinic bracket failed: lower end ") +
                                    std::string(to_string(at_lo.fate)) + ", upper end " +
                                    std::string(to_string(at_hi.fate)),
                                lo, hi));
  }
  double section_I = at_lo.first_section_I;
  while (hi - lo > cfg.homoclinic_width) {
    const double mid = 0.5 * (lo + hi);
    const ShotResult r = shoot(p.with_gamma(mid), cfg);
    if (r.fate == ManifoldFate::undecided) {
      throw Error(ErrorKind::detection, bracket_message("manifold fate undecided", lo, hi));
    }
    if (r.fate == ManifoldFate::captured) {
      lo = mid;
      section_I = r.first_section_I;
    } else {
      hi = mid;
    }
  }
  const double g = 0.5 * (lo + hi);
  return {BifurcationKind::HM, g, section_I, basic_reproduction_number(p.with_gamma(g))};
}

BifurcationPoint locate_cycle_fold(const ModelParams& p, double gamma_hm, double gamma_sn,
                                   const ContinuationConfig& cfg) {
  p.validate();
  double lo = gamma_hm;
  double hi = gamma_hm + 0.5 * (gamma_sn - gamma_hm);
  auto c_lo = find_stable_cycle(p.with_gamma(lo), cfg);
  const bool c_hi = find_stable_cycle(p.with_gamma(hi), cfg).has_value();
  if (!c_lo || c_hi) {
    throw Error(ErrorKind::detection,
                bracket_message(std::string("cycle-fold bracket failed: stable cycle ") +
                                    (c_lo ? "found" : "absent") + " at lower end, " +
                                    (c_hi ? "found" : "absent") + " at upper end",
                                lo, hi));
  }
  double section_I = c_lo->section_I;
  while (hi - lo > cfg.fold_width) {
    const double mid = 0.5 * (lo + hi);
    auto c = find_stable_cycle(p.with_gamma(mid), cfg);
    if (c) {
      lo = mid;
      section_I = c->section_I;
    } else {
      hi = mid;
    }
  }
  const double g = 0.5 * (lo + hi);
  return {BifurcationKind::FLC, g, section_I, basic_reproduction_number(p.with_gamma(g))};
}

std::vector<CycleBranchPoint> trace_cycle_branch(const ModelParams& p, double gamma_lo,
                                                 double gamma_hi, std::size_t steps,
                                                 const ContinuationConfig& cfg) {
  p.validate();
  if (steps < 1) throw Error(ErrorKind::invalid_input, "cycle branch needs at least 1 step");
  if (!(gamma_lo >= 0.0) || !(gamma_hi <= 1.0) || !(gamma_hi >= gamma_lo)) {
    throw Error(ErrorKind::invalid_input, "cycle branch needs 0 <= gamma_lo <= gamma_hi <= 1");
  }
  struct Slot {
    CycleBranchPoint stable;
    std::optional<CycleBranchPoint> unstable;
  };
  std::vector<Slot> slots(steps);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t k = next++; k < steps; k = next++) {
      const double g =
          steps == 1 ? gamma_lo
                     : gamma_lo + (gamma_hi - gamma_lo) * static_cast<double>(k) / (steps - 1);
      const ModelParams pg = p.with_gamma(g);
      Slot& slot = slots[k];
      slot.stable.gamma = g;
      slot.stable.stable = true;
      try {
        if (auto c = find_stable_cycle(pg, cfg)) {
          slot.stable.present = true;
          slot.stable.period = c->period;
          slot.stable.max_I = c->max_I();
        }
        if (auto c = find_unstable_cycle(pg, cfg)) {
          slot.unstable = CycleBranchPoint{g, true, c->period, false, c->max_I()};
        }
      } catch (const Error&) {
        // Recorded as absent.
      }
    }
  };

  const unsigned n = worker_count(cfg.threads, steps);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<CycleBranchPoint> out;
  for (const Slot& s : slots) {
    out.push_back(s.stable);
    if (s.unstable) out.push_back(*s.unstable);
  }
  return out;
}

std::vector<BifurcationPoint> BifurcationSet::ordered() const {
  return {tr, hb.point, hm, flc, sn};
}

BifurcationSet locate_bifurcations(const ModelParams& p, const ContinuationConfig& cfg) {
  BifurcationSet s;
  s.tr = locate_transcritical(p);
  s.sn = locate_saddle_node(p);
  s.hb = locate_hopf(p, cfg);
  s.hm = locate_homoclinic(p, s.hb.point.gamma, s.sn.gamma, cfg);
  s.flc = locate_cycle_fold(p, s.hm.gamma, s.sn.gamma, cfg);
  return s;
}

RegimeInfo classify_regime(const BifurcationSet& set, double g, double tol) {
  if (!(g >= 0.0 && g <= 1.0)) throw Error(ErrorKind::invalid_input, "gamma must lie in [0, 1]");
  const auto near = [&](double v) { return std::abs(g - v) <= tol; };
  RegimeInfo r;
  r.dfe = StabilityClass::stable_node;
  if (near(set.tr.gamma)) {
    r.id = "II";
    r.dfe = StabilityClass::semistable;
    r.endemic_stable = 1;
    r.endemic_semistable = 1;
  } else if (g < set.tr.gamma) {
    r.id = "I";
    r.dfe = StabilityClass::saddle;
    r.endemic_stable = 1;
  } else if (near(set.sn.gamma)) {
    r.id = "IX";
    r.endemic_unstable = 1;
  } else if (g > set.sn.gamma) {
    r.id = "X";
  } else if (g <= set.hb.point.gamma + tol) {
    r.id = "III";
    r.endemic_stable = 1;
    r.endemic_unstable = 1;
  } else {
    r.endemic_unstable = 2;
    if (near(set.hm.gamma)) {
      r.id = "V";
      r.cycles_stable = 1;
      r.homoclinic_orbits = 1;
    } else if (g < set.hm.gamma) {
      r.id = "IV";
      r.cycles_stable = 1;
    } else if (near(set.flc.gamma)) {
      r.id = "VII";
      r.cycles_semistable = 1;
    } else if (g < set.flc.gamma) {
      r.id = "VI";
      r.cycles_stable = 1;
      r.cycles_unstable = 1;
    } else {
      r.id = "VIII";
    }
  }
  return r;
}

}  // namespace sirsat
