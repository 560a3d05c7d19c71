#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "sirsat/analysis.hpp"
#include "sirsat/continuation.hpp"
#include "sirsat/error.hpp"

using namespace sirsat;

namespace {

const BifurcationSet& reference_set() {
  static const BifurcationSet set = locate_bifurcations(reference_params());
  return set;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::invalid_input;
}

}  // namespace

TEST_SUITE("continuation") {

TEST_CASE("gamma along the branch") {
  const ModelParams p = reference_params();
  CHECK(gamma_of_I(p, 65.1955050073) == doctest::Approx(0.3569024925).epsilon(1e-9));
  CHECK(gamma_of_I(p, 1e-9) == doctest::Approx(4969.0 / 31000.0).epsilon(1e-9));
  const double g30 = gamma_of_I(p, 30.0);
  const auto eq = endemic_equilibria(p.with_gamma(g30));
  CHECK(std::any_of(eq.begin(), eq.end(), [](const auto& e) { return std::abs(e.I - 30.0) < 1e-8 * 30; }));
  const auto c = cubic_coefficients(p.with_gamma(g30));
  CHECK(std::abs(c(30.0)) <= 1e-10 * c.magnitude(30.0));
}

TEST_CASE("gamma along the branch: errors") {
  const ModelParams p = reference_params();
  const double Is = admissibility_limit(p);
  CHECK(Is > 74.0);
  CHECK(kind_of([&] { gamma_of_I(p, Is); }) == ErrorKind::singularity);
  CHECK(kind_of([&] { gamma_of_I(p, Is + 1.0); }) == ErrorKind::singularity);
  CHECK(kind_of([&] { gamma_of_I(p, 0.0); }) == ErrorKind::invalid_input);
  CHECK(kind_of([&] { gamma_of_I(p, -1.0); }) == ErrorKind::invalid_input);
}

TEST_CASE("branch derivatives agree with finite differences") {
  const ModelParams p = reference_params();
  for (double I : {5.0, 30.0, 65.0, 70.0, 74.0}) {
    const double h = 1e-4;
    const double d1 = (gamma_of_I(p, I + h) - gamma_of_I(p, I - h)) / (2 * h);
    const double d2 = (gamma_of_I(p, I + h) - 2 * gamma_of_I(p, I) + gamma_of_I(p, I - h)) / (h * h);
    CHECK(gamma_of_I_derivative(p, I) == doctest::Approx(d1).epsilon(1e-6));
    CHECK(gamma_of_I_second_derivative(p, I) == doctest::Approx(d2).epsilon(1e-3));
  }
}

TEST_CASE("equilibrium branch round trip") {
  const ModelParams p = reference_params();
  const auto branch = equilibrium_branch(p, 0.01, 74.8, 500);
  REQUIRE(branch.size() == 500);
  double gmax = 0.0;
  for (const auto& b : branch) {
    gmax = std::max(gmax, b.gamma);
    const auto eq = endemic_equilibria(p.with_gamma(b.gamma));
    CHECK(std::any_of(eq.begin(), eq.end(), [&](const auto& e) {
      return std::abs(e.I - b.I) <= 1e-6 * b.I && std::abs(e.S - b.S) <= 1e-6 * b.S;
    }));
    const auto r = rhs_reduced(p.with_gamma(b.gamma), b.S, b.I);
    CHECK(std::hypot(r.dS, r.dI) <= 1e-8 * 1000);
  }
  CHECK(gmax == doctest::Approx(reference_set().sn.gamma).epsilon(1e-5));
}

TEST_CASE("equilibrium branch: preconditions and the gamma = 0.1 end") {
  const ModelParams p = reference_params();
  CHECK_THROWS_AS(equilibrium_branch(p, 10.0, 10.0, 2), Error);
  CHECK_THROWS_AS(equilibrium_branch(p, 1.0, 10.0, 1), Error);
  CHECK_THROWS_AS(equilibrium_branch(p, 1.0, 80.0, 10), Error);
  const double I1 = endemic_equilibria(p.with_gamma(0.1)).back().I;
  CHECK(gamma_of_I(p, I1) == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("stability flips across the Hopf ordinate") {
  const ModelParams p = reference_params();
  const double Ih = reference_set().hb.point.I;
  const auto branch = equilibrium_branch(p, Ih - 0.5, Ih + 0.5, 11);
  CHECK(branch.front().stability == StabilityClass::unstable_focus);
  CHECK(is_asymptotically_stable(branch.back().stability));
}

TEST_CASE("transcritical point") {
  const ModelParams p = reference_params();
  const auto tr = locate_transcritical(p);
  CHECK(tr.kind == BifurcationKind::TR);
  CHECK(std::abs(tr.gamma - 4969.0 / 31000.0) <= 1e-12);
  CHECK(tr.I == 0.0);
  CHECK(std::abs(basic_reproduction_number(p.with_gamma(tr.gamma)) - 1.0) <= 1e-14);
  ModelParams weak = p;
  weak.beta = 0.0002;
  CHECK(kind_of([&] { locate_transcritical(weak); }) == ErrorKind::out_of_range);
}

TEST_CASE("saddle-node point") {
  const ModelParams p = reference_params();
  const auto sn = locate_saddle_node(p);
  CHECK(std::abs(sn.gamma - 0.3569024925) <= 1e-8);
  CHECK(std::abs(sn.I - 65.1955050073) <= 1e-6);
  CHECK(std::abs(sn.R0 - 0.4506543710) <= 1e-8);
  const double h = 1e-4;
  CHECK(std::abs((gamma_of_I(p, sn.I + h) - gamma_of_I(p, sn.I - h)) / (2 * h)) <= 1e-9);
  ModelParams fwd = p;
  fwd.rho = 0.0001;
  CHECK(kind_of([&] { locate_saddle_node(fwd); }) == ErrorKind::structure);
}

TEST_CASE("Hopf point") {
  const auto hb = locate_hopf(reference_params());
  CHECK(std::abs(hb.point.gamma - 0.34964) <= 2e-5);
  CHECK(std::abs(hb.point.I - 70.721) <= 1e-3);
  CHECK(hb.point.gamma == doctest::Approx(0.3496375754).epsilon(1e-9));
  CHECK(hb.point.I == doctest::Approx(70.7209428218).epsilon(1e-9));
  CHECK(hb.dP_dI == doctest::Approx(0.0059945065).epsilon(1e-7));
  CHECK(hb.dgamma_dI == doctest::Approx(-0.0043073268).epsilon(1e-7));
  CHECK(hb.Q > 0);
  CHECK(hb.transversality > 0);
  CHECK(std::abs(branch_trace(reference_params(), hb.point.I)) < 1e-10);
}

TEST_CASE("no Hopf point in the forward regime") {
  ModelParams p = reference_params();
  p.rho = 0.0001;
  CHECK(kind_of([&] { locate_hopf(p); }) == ErrorKind::absent_hopf);
}

TEST_CASE("ordering of the bifurcation values") {
  const auto& s = reference_set();
  CHECK(s.tr.gamma < s.hb.point.gamma);
  CHECK(s.hb.point.gamma < s.hm.gamma);
  CHECK(s.hm.gamma < s.flc.gamma);
  CHECK(s.flc.gamma < s.sn.gamma);
  const auto ordered = s.ordered();
  REQUIRE(ordered.size() == 5);
  CHECK(ordered[0].kind == BifurcationKind::TR);
  CHECK(ordered[4].kind == BifurcationKind::SN);
  CHECK(std::abs(s.hm.gamma - 0.3498971211) <= 5e-4);
  CHECK(std::abs(s.flc.gamma - 0.3500585184) <= 2e-4);
  for (const auto& b : ordered) {
    CHECK(b.R0 == doctest::Approx(basic_reproduction_number(reference_params(b.gamma))));
  }
}

TEST_CASE("backward-bifurcation witness") {
  const ModelParams p = reference_params(reference_set().tr.gamma + 1e-3);
  CHECK(basic_reproduction_number(p) < 1.0);
  const auto eq = endemic_equilibria(p);
  REQUIRE(eq.size() == 2);
  CHECK(eq[0].stability == StabilityClass::saddle);
  CHECK(is_asymptotically_stable(eq[1].stability));
}

TEST_CASE("saddle manifold fate brackets the homoclinic value") {
  const ModelParams p = reference_params();
  const double hm = reference_set().hm.gamma;
  CHECK(shoot_unstable_manifold(p.with_gamma(hm - 1e-5)) == ManifoldFate::captured);
  CHECK(shoot_unstable_manifold(p.with_gamma(hm + 1e-5)) == ManifoldFate::escaped);
}

TEST_CASE("unstable cycle exists only above the homoclinic value") {
  const ModelParams p = reference_params();
  const double hm = reference_set().hm.gamma;
  CHECK_FALSE(find_unstable_cycle(p.with_gamma(hm - 1e-5)).has_value());
  CHECK(find_unstable_cycle(p.with_gamma(hm + 1e-4)).has_value());
}

TEST_CASE("stable-cycle predicate brackets the fold of cycles") {
  const ModelParams p = reference_params();
  CHECK(find_stable_cycle(p.with_gamma(0.35)).has_value());
  CHECK_FALSE(find_stable_cycle(p.with_gamma(0.353)).has_value());
  const double flc = reference_set().flc.gamma;
  CHECK(find_stable_cycle(p.with_gamma(flc - 2e-5)).has_value());
  CHECK_FALSE(find_stable_cycle(p.with_gamma(flc + 2e-5)).has_value());
}

TEST_CASE("locator bracketing failures are detection errors") {
  const ModelParams p = reference_params();
  CHECK(kind_of([&] { locate_homoclinic(p, 0.3497, 0.3498); }) == ErrorKind::detection);
  CHECK(kind_of([&] { locate_cycle_fold(p, 0.352, 0.3569); }) == ErrorKind::detection);
}

TEST_CASE("cycle branch rows") {
  const ModelParams p = reference_params();
  const auto rows = trace_cycle_branch(p, 0.3497, 0.35, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].gamma == 0.3497);
  CHECK(rows[0].present);
  CHECK(rows[0].stable);
  CHECK(rows[1].gamma == 0.35);
  CHECK(rows[1].stable);
  CHECK(rows[1].present);
  CHECK_FALSE(rows[2].stable);
  CHECK(rows[2].gamma == 0.35);
  CHECK(rows[2].present);
  CHECK(std::abs(rows[1].period - rows[2].period) > 1.0);
  CHECK_THROWS_AS(trace_cycle_branch(p, 0.35, 0.3497, 4), Error);
}

TEST_CASE("fold pairing: the unstable cycle encloses the stable one") {
  const auto& s = reference_set();
  const auto rows = trace_cycle_branch(reference_params(), s.hm.gamma + 2e-5, s.flc.gamma - 2e-5, 5);
  int pairs = 0;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    if (rows[k].stable && rows[k + 1].gamma == rows[k].gamma && !rows[k + 1].stable) {
      REQUIRE(rows[k].present);
      REQUIRE(rows[k + 1].present);
      CHECK(rows[k + 1].max_I > rows[k].max_I);
      ++pairs;
    }
  }
  CHECK(pairs == 5);
}

TEST_CASE("unstable-cycle period grows without bound toward the homoclinic value") {
  ContinuationConfig cfg;
  cfg.homoclinic_width = 1e-13;
  const auto& s = reference_set();
  const ModelParams p = reference_params();
  const double hm = locate_homoclinic(p, s.hb.point.gamma, s.sn.gamma, cfg).gamma;
  CHECK(std::abs(hm - s.hm.gamma) < 1e-7);

  double prev = 0.0;
  for (int k = 4; k <= 8; ++k) {
    const auto u = find_unstable_cycle(p.with_gamma(hm + std::pow(10.0, -k)));
    REQUIRE(u.has_value());
    CHECK(u->period > prev);
    prev = u->period;
  }

  const ModelParams near = p.with_gamma(hm + 3e-12);
  const auto u = find_unstable_cycle(near);
  const auto st = find_stable_cycle(near);
  REQUIRE(u.has_value());
  REQUIRE(st.has_value());
  CHECK(u->period > 10.0 * st->period);
}

TEST_CASE("regime classification") {
  const auto& s = reference_set();
  CHECK(classify_regime(s, 0.1).id == "I");
  CHECK(classify_regime(s, s.tr.gamma).id == "II");
  CHECK(classify_regime(s, 0.3).id == "III");
  CHECK(classify_regime(s, s.hb.point.gamma).id == "III");
  CHECK(classify_regime(s, 0.3497).id == "IV");
  CHECK(classify_regime(s, s.hm.gamma).id == "V");
  CHECK(classify_regime(s, 0.35).id == "VI");
  CHECK(classify_regime(s, s.flc.gamma).id == "VII");
  CHECK(classify_regime(s, 0.353).id == "VIII");
  CHECK(classify_regime(s, s.sn.gamma).id == "IX");
  CHECK(classify_regime(s, 0.36).id == "X");
  CHECK(classify_regime(s, 1.0).id == "X");
  CHECK_THROWS_AS(classify_regime(s, 1.1), Error);
  CHECK_THROWS_AS(classify_regime(s, -0.1), Error);
}

}  // TEST_SUITE
