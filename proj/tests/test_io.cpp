#include <cmath>
#include <limits>
#include <sstream>

#include <doctest.h>

#include "sirsat/error.hpp"
#include "sirsat/io.hpp"

using namespace sirsat;

TEST_SUITE("io") {

TEST_CASE("params JSON round trip") {
  const ModelParams p = reference_params(0.3497);
  const ModelParams q = io::params_from_json(io::params_to_json(p).dump());
  CHECK(q.beta == p.beta);
  CHECK(q.lambda == p.lambda);
  CHECK(q.mu == p.mu);
  CHECK(q.mu_prime == p.mu_prime);
  CHECK(q.alpha == p.alpha);
  CHECK(q.rho == p.rho);
  CHECK(q.gamma == p.gamma);
}

TEST_CASE("params JSON is strict") {
  const std::string ok =
      R"({"beta":0.05,"lambda":10,"mu":0.01,"mu_prime":0.1,"alpha":0.2,"rho":0.1,"gamma":0.1})";
  CHECK_NOTHROW(io::params_from_json(ok));
  CHECK_THROWS_AS(io::params_from_json(
                      R"({"beta":0.05,"lambda":10,"mu":0.01,"mu_prime":0.1,"alpha":0.2,"rho":0.1})"),
                  Error);
  CHECK_THROWS_AS(io::params_from_json(
                      R"({"beta":0.05,"lambda":10,"mu":0.01,"mu_prime":0.1,"alpha":0.2,"rho":0.1,"gamma":0.1,"x":1})"),
                  Error);
  CHECK_THROWS_AS(io::params_from_json(
                      R"({"beta":"a","lambda":10,"mu":0.01,"mu_prime":0.1,"alpha":0.2,"rho":0.1,"gamma":0.1})"),
                  Error);
  CHECK_THROWS_AS(io::params_from_json("{"), Error);
  CHECK_THROWS_AS(io::params_from_json(
                      R"({"beta":0.05,"lambda":10,"mu":0.01,"mu_prime":0.1,"alpha":0.2,"rho":2,"gamma":0.1})"),
                  Error);
}

TEST_CASE("single parameter overrides") {
  ModelParams p = reference_params(0.1);
  io::set_param(p, "gamma", "0.35");
  CHECK(p.gamma == 0.35);
  io::set_param(p, "mu_prime", "0.2");
  CHECK(p.mu_prime == 0.2);
  CHECK_THROWS_AS(io::set_param(p, "delta", "1"), Error);
  CHECK_THROWS_AS(io::set_param(p, "beta", "abc"), Error);
}

TEST_CASE("number formatting") {
  CHECK(io::format17(0.1) == "0.10000000000000001");
  CHECK(io::format17(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(io::round12(1.0 / 3.0) == 0.333333333333);
  CHECK(!std::signbit(io::round12(-0.0)));
}

TEST_CASE("trajectory CSV") {
  Trajectory t;
  t.samples = {{0.0, 100.0, 0.001, 0.0}, {0.5, 99.0, 0.002, 1e-5}};
  const std::string csv = io::trajectory_to_csv(t);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,S,I,R");
  std::getline(in, line);
  CHECK(line == "0,100,0.001,0");
  std::getline(in, line);
  CHECK(line == "0.5,99,0.002,1.0000000000000001e-05");
}

TEST_CASE("schedule CSV and JSON") {
  const GammaSchedule s({{0.0, 0.3}, {200.0, 0.1}}, 400.0);
  const std::string csv = io::schedule_to_csv(s);
  CHECK(csv.rfind("t_start,gamma\n", 0) == 0);
  const GammaSchedule a = io::schedule_from_csv(csv);
  REQUIRE(a.segments().size() == 2);
  CHECK(a.segments()[1].t_start == 200.0);
  CHECK(a.segments()[1].gamma == 0.1);
  CHECK(a.t_end() == 400.0);
  const GammaSchedule b = io::schedule_from_text(io::schedule_to_json(s).dump());
  CHECK(b.segments().size() == 2);
  CHECK(b.t_end() == 400.0);
  const GammaSchedule c = io::schedule_from_text(csv);
  CHECK(c.segments()[0].gamma == 0.3);

  CHECK_THROWS_AS(io::schedule_from_csv("t_start,gamma\n0,0.3\n"), Error);
  CHECK_THROWS_AS(io::schedule_from_csv("start,g\n0,0.3\nt_end,10\n"), Error);
  CHECK_THROWS_AS(io::schedule_from_csv("t_start,gamma\n0,zz\nt_end,10\n"), Error);
  CHECK_THROWS_AS(io::schedule_from_csv("t_start,gamma\n5,0.3\nt_end,10\n"), Error);
  CHECK_THROWS_AS(io::schedule_from_json(R"({"segments":[]})"), Error);
}

TEST_CASE("equilibrium JSON carries eigenvalue pairs") {
  const auto j = io::to_json(disease_free_equilibrium(reference_params(0.3)));
  CHECK(j["kind"] == "disease_free");
  REQUIRE(j["eigenvalues"].size() == 2);
  CHECK(j["eigenvalues"][0].contains("re"));
  CHECK(j["eigenvalues"][0].contains("im"));
  CHECK(j["stability"] == "stable_node");
}

TEST_CASE("cycle CSV marks absent rows") {
  const std::string csv = io::cycles_to_csv({{0.35, false, 0.0, true, 0.0}, {0.35, true, 12.5, false, 80.0}});
  CHECK(csv == "gamma,period,stable,max_I\n0.34999999999999998,nan,true,nan\n"
               "0.34999999999999998,12.5,false,80\n");
}

}  // TEST_SUITE
