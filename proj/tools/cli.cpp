#include "cli.hpp"

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sirsat/analysis.hpp"
#include "sirsat/continuation.hpp"
#include "sirsat/error.hpp"
#include "sirsat/io.hpp"
#include "sirsat/scenario.hpp"
#include "sirsat/solver.hpp"

namespace sirsat::cli {

namespace {

using io::Json;

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct Config {
  std::string params_path;
  std::vector<std::string> overrides;
  std::string format;  // empty: the subcommand's natural format
  std::string out_path;
  double rtol = 0.0;   // 0: library default
  double atol = 0.0;
  long long seed = 0;  // reserved
};

struct Output {
  std::string text;
  int code = kExitOk;
};

ModelParams load_params(const Config& cfg) {
  ModelParams p = cfg.params_path.empty() ? reference_params(0.1)
                                          : io::params_from_json(io::read_file(cfg.params_path));
  for (const std::string& kv : cfg.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::invalid_input, "--set expects key=value, got '" + kv + "'");
    }
    io::set_param(p, kv.substr(0, eq), kv.substr(eq + 1));
  }
  p.validate();
  return p;
}

IntegrationOptions integration_options(const Config& cfg) {
  IntegrationOptions o;
  if (cfg.rtol > 0.0) o.rtol = cfg.rtol;
  if (cfg.atol > 0.0) o.atol = cfg.atol;
  return o;
}

ContinuationConfig continuation_config(const Config& cfg) {
  ContinuationConfig c;
  if (cfg.rtol > 0.0) c.cycle.rtol = cfg.rtol;
  if (cfg.atol > 0.0) c.cycle.atol = cfg.atol;
  return c;
}

bool wants_csv(const Config& cfg, bool csv_by_default) {
  if (cfg.format.empty()) return csv_by_default;
  return cfg.format == "csv";
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

State parse_state(const std::vector<double>& v) {
  if (v.size() != 3) throw Error(ErrorKind::invalid_input, "--init expects S,I,R");
  return {v[0], v[1], v[2]};
}

Output cmd_analyze(const Config& cfg, const std::optional<double>& gamma) {
  ModelParams p = load_params(cfg);
  if (gamma) {
    p.gamma = *gamma;
    p.validate();
  }
  const auto dfe = disease_free_equilibrium(p);
  const auto endemic = endemic_equilibria(p);
  const auto cubic = cubic_coefficients(p);

  std::optional<RegimeInfo> regime;
  std::string regime_note;
  try {
    regime = classify_regime(locate_bifurcations(p, continuation_config(cfg)), p.gamma);
  } catch (const Error& e) {
    regime_note = e.what();
  }

  if (wants_csv(cfg, false)) {
    std::vector<EquilibriumReport> all{dfe};
    all.insert(all.end(), endemic.begin(), endemic.end());
    std::string text = "kind,S,I,R,stability\n";
    for (const auto& r : all) {
      text += std::string(to_string(r.kind)) + ',' + io::format17(r.S) + ',' +
              io::format17(r.I) + ',' + io::format17(r.R) + ',' +
              std::string(to_string(r.stability)) + '\n';
    }
    return {text};
  }

  Json j;
  j["params"] = io::params_to_json(p);
  j["R0"] = io::round12(basic_reproduction_number(p));
  j["disease_free"] = io::to_json(dfe);
  Json eq = Json::array();
  for (const auto& e : endemic) eq.push_back(io::to_json(e));
  j["endemic"] = eq;
  j["cubic"] = io::to_json(cubic);
  j["descartes"] = io::to_json(descartes_possible_counts(cubic));
  j["sensitivity"] = io::to_json(sensitivity_indices(p));
  try {
    j["transcritical"] = io::to_json(transcritical_direction(p));
  } catch (const Error& e) {
    j["transcritical"] = nullptr;
    j["transcritical_note"] = e.what();
  }
  if (regime) {
    j["regime"] = regime->id;
    j["regime_counts"] = io::to_json(*regime);
  } else {
    j["regime"] = nullptr;
    j["regime_note"] = regime_note;
  }
  return {dump(j)};
}

Output cmd_bifurcations(const Config& cfg) {
  const ModelParams p = load_params(cfg);
  const BifurcationSet set = locate_bifurcations(p, continuation_config(cfg));
  const auto points = set.ordered();
  if (wants_csv(cfg, false)) {
    std::string text = "kind,gamma,I,R0\n";
    for (const auto& b : points) {
      text += std::string(to_string(b.kind)) + ',' + io::format17(b.gamma) + ',' +
              io::format17(b.I) + ',' + io::format17(b.R0) + '\n';
    }
    return {text};
  }
  return {dump(io::to_json(points))};
}

Output cmd_branch(const Config& cfg, std::optional<double> i_min, std::optional<double> i_max,
                  long long steps) {
  const ModelParams p = load_params(cfg);
  if (steps < 2) throw Error(ErrorKind::invalid_input, "--steps must be at least 2");
  const double is = admissibility_limit(p);
  const auto branch = equilibrium_branch(p, i_min.value_or(1e-3 * is), i_max.value_or(0.999 * is),
                                         static_cast<std::size_t>(steps));
  if (wants_csv(cfg, true)) return {io::branch_to_csv(branch)};
  Json arr = Json::array();
  for (const auto& b : branch) {
    arr.push_back(Json{{"I", io::round12(b.I)},
                       {"gamma", io::round12(b.gamma)},
                       {"S", io::round12(b.S)},
                       {"stability", std::string(to_string(b.stability))}});
  }
  return {dump(arr)};
}

std::string trajectory_text(const Trajectory& t, bool csv) {
  if (csv) return io::trajectory_to_csv(t);
  Json arr = Json::array();
  for (const Sample& s : t.samples) {
    arr.push_back(Json{{"t", io::round12(s.t)},
                       {"S", io::round12(s.S)},
                       {"I", io::round12(s.I)},
                       {"R", io::round12(s.R)}});
  }
  return dump(arr);
}

Output portrait_text(const ModelParams& p, double t_end, const IntegrationOptions& o,
                     bool csv) {
  const auto orbits = phase_portrait(p, t_end, o);
  if (csv) {
    std::string text = "orbit,t,S,I,R\n";
    for (std::size_t k = 0; k < orbits.size(); ++k) {
      const std::string body = io::trajectory_to_csv(orbits[k]);
      std::istringstream in(body.substr(body.find('\n') + 1));
      for (std::string line; std::getline(in, line);) text += std::to_string(k) + ',' + line + '\n';
    }
    return {text};
  }
  Json arr = Json::array();
  for (std::size_t k = 0; k < orbits.size(); ++k) {
    arr.push_back(Json{{"orbit", k}, {"samples", Json::parse(trajectory_text(orbits[k], false))}});
  }
  return {dump(arr)};
}

Output cmd_simulate(const Config& cfg, const std::vector<double>& init, double t_end,
                    const std::string& schedule_path, bool builtin, bool portrait,
                    double max_step) {
  const ModelParams p = load_params(cfg);
  const State s0 = parse_state(init);
  IntegrationOptions o = integration_options(cfg);
  if (max_step > 0.0) o.max_step = max_step;
  if (portrait) {
    if (builtin || !schedule_path.empty()) {
      throw Error(ErrorKind::invalid_input, "--portrait cannot be combined with a schedule");
    }
    return portrait_text(p, t_end, o, wants_csv(cfg, true));
  }
  Trajectory t;
  if (builtin) {
    t = integrate_schedule(p, builtin_schedule(), s0, o);
  } else if (!schedule_path.empty()) {
    t = integrate_schedule(p, io::schedule_from_text(io::read_file(schedule_path)), s0, o);
  } else {
    t = integrate(p, s0, t_end, o);
  }
  return {trajectory_text(t, wants_csv(cfg, true))};
}

Output cmd_cycles(const Config& cfg, double g_min, double g_max, long long steps,
                  unsigned threads) {
  const ModelParams p = load_params(cfg);
  if (steps < 1) throw Error(ErrorKind::invalid_input, "--steps must be at least 1");
  ContinuationConfig c = continuation_config(cfg);
  c.threads = threads;
  const auto rows = trace_cycle_branch(p, g_min, g_max, static_cast<std::size_t>(steps), c);
  if (wants_csv(cfg, true)) return {io::cycles_to_csv(rows)};
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back(Json{{"gamma", io::round12(r.gamma)},
                       {"present", r.present},
                       {"period", r.present ? Json(io::round12(r.period)) : Json(nullptr)},
                       {"stable", r.stable},
                       {"max_I", r.present ? Json(io::round12(r.max_I)) : Json(nullptr)}});
  }
  return {dump(arr)};
}

Output cmd_scenario(const Config& cfg, const std::string& schedule_path,
                    const std::vector<double>& init, const std::string& trajectory_path) {
  const ModelParams p = load_params(cfg);
  const bool builtin = schedule_path.empty();
  const GammaSchedule sched =
      builtin ? builtin_schedule() : io::schedule_from_text(io::read_file(schedule_path));
  const State s0 = init.empty() ? builtin_initial_state() : parse_state(init);
  const IntegrationOptions o = integration_options(cfg);
  const ScenarioReport report = run_scenario(p, sched, s0, o);

  bool ok = report.all_met();
  Json j = io::to_json(report);
  j["schedule"] = io::schedule_to_json(sched);
  if (builtin) {
    const ScenarioReport demo = run_hysteresis_demo(p, {}, o);
    j["hysteresis_demo"] = io::to_json(demo);
    j["hysteresis_verdict"] = report.hysteresis_verdict && demo.hysteresis_verdict;
    ok = ok && demo.hysteresis_verdict;
  }
  if (!trajectory_path.empty()) io::write_file(trajectory_path, io::trajectory_to_csv(report.trajectory));

  Output out;
  out.text = wants_csv(cfg, false) ? io::trajectory_to_csv(report.trajectory) : dump(j);
  out.code = ok ? kExitOk : kExitNumeric;
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SIR model with saturated incidence and recovery: analysis, bifurcations, "
               "continuation and scenarios",
               "sirsat"};
  app.require_subcommand(1);
  app.fallthrough();

  Config cfg;
  app.add_option("--params", cfg.params_path, "Parameter JSON file (default: reference set)");
  app.add_option("--set", cfg.overrides, "Override a parameter, key=value (repeatable)");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out_path, "Write output to FILE instead of stdout");
  app.add_option("--rtol", cfg.rtol, "Relative integration tolerance")->check(CLI::PositiveNumber);
  app.add_option("--atol", cfg.atol, "Absolute integration tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Reserved; the pipeline is deterministic");

  auto* analyze = app.add_subcommand("analyze", "R0, equilibria, stability, sensitivity, regime");
  std::optional<double> analyze_gamma;
  analyze->add_option("--gamma", analyze_gamma, "Override gamma");

  auto* bif = app.add_subcommand("bifurcations", "Locate TR, HB, HM, FLC and SN");

  auto* branch = app.add_subcommand("branch", "Equilibrium branch (I, gamma) as CSV");
  std::optional<double> i_min;
  std::optional<double> i_max;
  long long branch_steps = 500;
  branch->add_option("--i-min", i_min, "Smallest I on the grid");
  branch->add_option("--i-max", i_max, "Largest I on the grid");
  branch->add_option("--steps", branch_steps, "Number of grid points");

  auto* sim = app.add_subcommand("simulate", "Integrate the full model");
  std::vector<double> sim_init{100.0, 0.001, 0.0};
  double t_end = 400.0;
  std::string sim_schedule;
  bool sim_builtin = false;
  bool sim_portrait = false;
  double max_step = 0.0;
  sim->add_option("--init", sim_init, "Initial S,I,R")->delimiter(',')->expected(3);
  sim->add_option("--t-end", t_end, "Final time (constant gamma)");
  sim->add_option("--schedule", sim_schedule, "Piecewise-constant gamma schedule (CSV or JSON)");
  sim->add_flag("--builtin-schedule", sim_builtin, "Use the built-in narrative schedule");
  sim->add_flag("--portrait", sim_portrait,
                "Phase portrait from the default grid of eight boundary starting points");
  sim->add_option("--max-step", max_step, "Largest step size");

  auto* cyc = app.add_subcommand("cycles", "Limit-cycle branch: period against gamma");
  double g_min = 0.3497;
  double g_max = 0.35005;
  long long cyc_steps = 30;
  unsigned threads = 0;
  cyc->add_option("--gamma-min", g_min, "Lower end of the gamma grid");
  cyc->add_option("--gamma-max", g_max, "Upper end of the gamma grid");
  cyc->add_option("--steps", cyc_steps, "Number of grid points");
  cyc->add_option("--threads", threads, "Worker threads (0: all cores)");

  auto* scen = app.add_subcommand("scenario", "Run a schedule with the narrative checkpoints");
  std::string scen_schedule;
  std::vector<double> scen_init;
  std::string traj_path;
  scen->add_option("--schedule", scen_schedule, "Schedule file (default: built-in)");
  scen->add_option("--init", scen_init, "Initial S,I,R")->delimiter(',')->expected(3);
  scen->add_option("--trajectory", traj_path, "Also write the trajectory CSV to FILE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    Output result;
    if (analyze->parsed()) {
      result = cmd_analyze(cfg, analyze_gamma);
    } else if (bif->parsed()) {
      result = cmd_bifurcations(cfg);
    } else if (branch->parsed()) {
      result = cmd_branch(cfg, i_min, i_max, branch_steps);
    } else if (sim->parsed()) {
      result = cmd_simulate(cfg, sim_init, t_end, sim_schedule, sim_builtin, sim_portrait, max_step);
    } else if (cyc->parsed()) {
      result = cmd_cycles(cfg, g_min, g_max, cyc_steps, threads);
    } else {
      result = cmd_scenario(cfg, scen_schedule, scen_init, traj_path);
    }
    if (cfg.out_path.empty()) {
      out << result.text;
    } else {
      io::write_file(cfg.out_path, result.text);
    }
    return result.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_numeric_failure(e.kind()) ? kExitNumeric : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace sirsat::cli
