#include "sirsat/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sirsat/error.hpp"

namespace sirsat::io {

namespace {

constexpr const char* kParamKeys[] = {"beta", "lambda", "mu", "mu_prime", "alpha", "rho", "gamma"};

double* param_slot(ModelParams& p, std::string_view key) {
  if (key == "beta") return &p.beta;
  if (key == "lambda") return &p.lambda;
  if (key == "mu") return &p.mu;
  if (key == "mu_prime") return &p.mu_prime;
  if (key == "alpha") return &p.alpha;
  if (key == "rho") return &p.rho;
  if (key == "gamma") return &p.gamma;
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::string_view what) {
  const std::string s(trim(text));
  if (s.empty()) throw Error(ErrorKind::invalid_input, "empty value for " + std::string(what));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw Error(ErrorKind::invalid_input,
                "not a finite number for " + std::string(what) + ": '" + s + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Json::value_type num(double x) { return round12(x); }

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string(what) + " is not valid JSON: " + e.what());
  }
}

double json_number(const Json& j, std::string_view what) {
  if (!j.is_number()) {
    throw Error(ErrorKind::invalid_input, std::string(what) + " must be a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, std::string(what) + " not finite");
  return v;
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr) + 0.0;
}

std::string format17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::invalid_input, "cannot write file: " + path);
  out << text;
  if (!out) throw Error(ErrorKind::invalid_input, "write failed: " + path);
}

ModelParams params_from_json(std::string_view text) {
  const Json j = parse_json(text, "params");
  if (!j.is_object()) throw Error(ErrorKind::invalid_input, "params must be a JSON object");
  ModelParams p;
  for (const auto& [key, value] : j.items()) {
    double* slot = param_slot(p, key);
    if (!slot) throw Error(ErrorKind::invalid_input, "unknown parameter key: " + key);
    *slot = json_number(value, key);
  }
  for (const char* key : kParamKeys) {
    if (!j.contains(key)) {
      throw Error(ErrorKind::invalid_input, std::string("missing parameter key: ") + key);
    }
  }
  p.validate();
  return p;
}

Json params_to_json(const ModelParams& p) {
  return Json{{"beta", num(p.beta)},         {"lambda", num(p.lambda)}, {"mu", num(p.mu)},
              {"mu_prime", num(p.mu_prime)}, {"alpha", num(p.alpha)},   {"rho", num(p.rho)},
              {"gamma", num(p.gamma)}};
}

void set_param(ModelParams& p, std::string_view key, std::string_view value) {
  double* slot = param_slot(p, trim(key));
  if (!slot) throw Error(ErrorKind::invalid_input, "unknown parameter key: " + std::string(key));
  *slot = parse_number(value, key);
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string out = "t,S,I,R\n";
  for (const Sample& s : traj.samples) {
    out += format17(s.t) + ',' + format17(s.S) + ',' + format17(s.I) + ',' + format17(s.R) + '\n';
  }
  return out;
}

GammaSchedule schedule_from_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::string_view line : split(text, '\n')) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty() || lines.front() != "t_start,gamma") {
    throw Error(ErrorKind::invalid_input, "schedule CSV must start with header t_start,gamma");
  }
  if (lines.size() < 3) {
    throw Error(ErrorKind::invalid_input, "schedule CSV needs a segment row and a t_end row");
  }
  std::vector<GammaSegment> segs;
  double t_end = 0.0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split(lines[k], ',');
    if (cells.size() != 2) {
      throw Error(ErrorKind::invalid_input, "schedule CSV row " + std::to_string(k + 1) +
                                                " must have two fields");
    }
    const bool footer = trim(cells[0]) == "t_end";
    if (footer != (k + 1 == lines.size())) {
      throw Error(ErrorKind::invalid_input, "schedule CSV must end with exactly one t_end row");
    }
    if (footer) {
      t_end = parse_number(cells[1], "t_end");
    } else {
      segs.push_back({parse_number(cells[0], "t_start"), parse_number(cells[1], "gamma")});
    }
  }
  return GammaSchedule(std::move(segs), t_end);
}

std::string schedule_to_csv(const GammaSchedule& sched) {
  std::string out = "t_start,gamma\n";
  for (const auto& s : sched.segments()) out += format17(s.t_start) + ',' + format17(s.gamma) + '\n';
  out += "t_end," + format17(sched.t_end()) + '\n';
  return out;
}

GammaSchedule schedule_from_json(std::string_view text) {
  const Json j = parse_json(text, "schedule");
  if (!j.is_object() || !j.contains("segments") || !j.contains("t_end") || j.size() != 2 ||
      !j["segments"].is_array()) {
    throw Error(ErrorKind::invalid_input,
                "schedule JSON must be {\"segments\": [...], \"t_end\": number}");
  }
  std::vector<GammaSegment> segs;
  for (const auto& s : j["segments"]) {
    if (!s.is_object() || s.size() != 2 || !s.contains("t_start") || !s.contains("gamma")) {
      throw Error(ErrorKind::invalid_input, "each segment must be {\"t_start\", \"gamma\"}");
    }
    segs.push_back({json_number(s["t_start"], "t_start"), json_number(s["gamma"], "gamma")});
  }
  return GammaSchedule(std::move(segs), json_number(j["t_end"], "t_end"));
}

Json schedule_to_json(const GammaSchedule& sched) {
  Json segs = Json::array();
  for (const auto& s : sched.segments()) {
    segs.push_back(Json{{"t_start", num(s.t_start)}, {"gamma", num(s.gamma)}});
  }
  return Json{{"segments", segs}, {"t_end", num(sched.t_end())}};
}

GammaSchedule schedule_from_text(std::string_view text) {
  const std::string_view t = trim(text);
  if (!t.empty() && t.front() == '{') return schedule_from_json(t);
  return schedule_from_csv(t);
}

Json to_json(const EquilibriumReport& r) {
  Json j{{"kind", std::string(to_string(r.kind))},
         {"S", num(r.S)},
         {"I", num(r.I)},
         {"R", num(r.R)}};
  if (r.P) j["P"] = num(*r.P);
  if (r.Q) j["Q"] = num(*r.Q);
  Json ev = Json::array();
  for (const auto& e : r.eigenvalues) ev.push_back(Json{{"re", num(e.real())}, {"im", num(e.imag())}});
  j["eigenvalues"] = ev;
  j["stability"] = std::string(to_string(r.stability));
  if (r.kind == EquilibriumKind::endemic) j["coalesced"] = r.coalesced;
  return j;
}

Json to_json(const SensitivityIndices& s) {
  return Json{{"upsilon_beta", num(s.upsilon_beta)},
              {"upsilon_lambda", num(s.upsilon_lambda)},
              {"upsilon_gamma", num(s.upsilon_gamma)},
              {"upsilon_mu", num(s.upsilon_mu)},
              {"upsilon_mu_prime", num(s.upsilon_mu_prime)},
              {"upsilon_alpha", num(s.upsilon_alpha)}};
}

Json to_json(const TranscriticalInfo& t) {
  return Json{{"direction", std::string(to_string(t.direction))},
              {"slope", num(t.slope)},
              {"threshold", num(t.threshold)}};
}

Json to_json(const DescartesCounts& d) {
  return Json{{"possible_counts", d.counts},
              {"sign_changes", d.sign_changes},
              {"zero_inner_coefficient", d.zero_inner_coefficient}};
}

Json to_json(const CubicCoeffs& c) {
  return Json{{"a", num(c.a)}, {"b", num(c.b)}, {"c", num(c.c)}, {"d", num(c.d)}};
}

Json to_json(const RegimeInfo& r) {
  return Json{{"case", r.id},
              {"disease_free", std::string(to_string(r.dfe))},
              {"endemic",
               Json{{"stable", r.endemic_stable},
                    {"unstable", r.endemic_unstable},
                    {"semistable", r.endemic_semistable}}},
              {"periodic_orbits",
               Json{{"stable", r.cycles_stable},
                    {"unstable", r.cycles_unstable},
                    {"semistable", r.cycles_semistable},
                    {"homoclinic", r.homoclinic_orbits}}}};
}

Json to_json(const BifurcationPoint& b) {
  return Json{{"kind", std::string(to_string(b.kind))},
              {"gamma", num(b.gamma)},
              {"I", num(b.I)},
              {"R0", num(b.R0)}};
}

Json to_json(const std::vector<BifurcationPoint>& points) {
  Json arr = Json::array();
  for (const auto& b : points) arr.push_back(to_json(b));
  return arr;
}

Json to_json(const ScenarioReport& r) {
  Json cps = Json::array();
  for (const auto& c : r.checkpoints) {
    cps.push_back(Json{{"label", c.label}, {"t", num(c.t)}, {"I", num(c.I)}, {"expectation_met", c.met}});
  }
  const State& f = r.trajectory.final_state;
  return Json{{"checkpoints", cps},
              {"hysteresis_verdict", r.hysteresis_verdict},
              {"final_state", Json{{"S", num(f.S)}, {"I", num(f.I)}, {"R", num(f.R)}}},
              {"samples", r.trajectory.samples.size()},
              {"clamped", r.trajectory.clamped}};
}

std::string branch_to_csv(const std::vector<BranchPoint>& branch) {
  std::string out = "I,gamma,S,stability\n";
  for (const auto& b : branch) {
    out += format17(b.I) + ',' + format17(b.gamma) + ',' + format17(b.S) + ',' +
           std::string(to_string(b.stability)) + '\n';
  }
  return out;
}

std::string cycles_to_csv(const std::vector<CycleBranchPoint>& rows) {
  const double nan = std::nan("");
  std::string out = "gamma,period,stable,max_I\n";
  for (const auto& r : rows) {
    out += format17(r.gamma) + ',' + format17(r.present ? r.period : nan) + ',' +
           (r.stable ? "true" : "false") + ',' + format17(r.present ? r.max_I : nan) + '\n';
  }
  return out;
}

}  // namespace sirsat::io
