#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sirsat/analysis.hpp"
#include "sirsat/continuation.hpp"
#include "sirsat/error.hpp"
#include "sirsat/io.hpp"
#include "sirsat/model.hpp"
#include "sirsat/scenario.hpp"
#include "sirsat/solver.hpp"

namespace py = pybind11;
using namespace sirsat;

namespace {

py::array_t<double> samples_array(const Trajectory& t) {
  py::array_t<double> a({static_cast<py::ssize_t>(t.samples.size()), py::ssize_t{4}});
  auto m = a.mutable_unchecked<2>();
  for (py::ssize_t k = 0; k < m.shape(0); ++k) {
    const Sample& s = t.samples[static_cast<std::size_t>(k)];
    m(k, 0) = s.t;
    m(k, 1) = s.S;
    m(k, 2) = s.I;
    m(k, 3) = s.R;
  }
  return a;
}

py::dict report_dict(const ScenarioReport& r) {
  py::list cps;
  for (const auto& c : r.checkpoints) {
    cps.append(py::dict(py::arg("label") = c.label, py::arg("t") = c.t, py::arg("I") = c.I,
                        py::arg("expectation_met") = c.met));
  }
  return py::dict(py::arg("checkpoints") = cps,
                  py::arg("hysteresis_verdict") = r.hysteresis_verdict,
                  py::arg("samples") = samples_array(r.trajectory));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SIR model with saturated incidence and saturated recovery";

  static py::exception<Error> exc(m, "SirsatError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc, e.what());
    }
  });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double beta, double lambda_, double mu, double mu_prime, double alpha,
                       double rho, double gamma) {
             ModelParams p{beta, lambda_, mu, mu_prime, alpha, rho, gamma};
             p.validate();
             return p;
           }),
           py::arg("beta"), py::arg("lambda_"), py::arg("mu"), py::arg("mu_prime"),
           py::arg("alpha"), py::arg("rho"), py::arg("gamma"))
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("lambda_", &ModelParams::lambda)
      .def_readwrite("mu", &ModelParams::mu)
      .def_readwrite("mu_prime", &ModelParams::mu_prime)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("rho", &ModelParams::rho)
      .def_readwrite("gamma", &ModelParams::gamma)
      .def("with_gamma", &ModelParams::with_gamma)
      .def("to_json", [](const ModelParams& p) { return io::params_to_json(p).dump(); })
      .def_static("from_json", [](const std::string& s) { return io::params_from_json(s); })
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(" + io::params_to_json(p).dump() + ")";
      });

  m.def(
      "reference_params",
      [](double gamma) {
        ModelParams p = reference_params(gamma);
        p.validate();
        return p;
      },
      py::arg("gamma") = 0.1);

  m.def("rhs_full", [](const ModelParams& p, double S, double I, double R) {
    const auto d = rhs_full(p, {S, I, R});
    return py::make_tuple(d.dS, d.dI, d.dR);
  });
  m.def("basic_reproduction_number", &basic_reproduction_number);

  py::class_<EquilibriumReport>(m, "EquilibriumReport")
      .def_property_readonly("kind", [](const EquilibriumReport& r) { return std::string(to_string(r.kind)); })
      .def_readonly("S", &EquilibriumReport::S)
      .def_readonly("I", &EquilibriumReport::I)
      .def_readonly("R", &EquilibriumReport::R)
      .def_readonly("P", &EquilibriumReport::P)
      .def_readonly("Q", &EquilibriumReport::Q)
      .def_property_readonly("eigenvalues", [](const EquilibriumReport& r) {
        return std::vector<std::complex<double>>{r.eigenvalues[0], r.eigenvalues[1]};
      })
      .def_property_readonly("stability",
                             [](const EquilibriumReport& r) { return std::string(to_string(r.stability)); })
      .def_readonly("coalesced", &EquilibriumReport::coalesced);

  m.def("disease_free_equilibrium", &disease_free_equilibrium);
  m.def("endemic_equilibria", &endemic_equilibria);
  m.def("cubic_coefficients", [](const ModelParams& p) {
    const auto c = cubic_coefficients(p);
    return py::make_tuple(c.a, c.b, c.c, c.d);
  });
  m.def("sensitivity_indices", [](const ModelParams& p) {
    return py::module_::import("json").attr("loads")(io::to_json(sensitivity_indices(p)).dump());
  });
  m.def("transcritical_direction", [](const ModelParams& p) {
    const auto t = transcritical_direction(p);
    return py::dict(py::arg("direction") = std::string(to_string(t.direction)),
                    py::arg("slope") = t.slope, py::arg("threshold") = t.threshold);
  });

  m.def(
      "integrate",
      [](const ModelParams& p, std::array<double, 3> init, double t_end, double rtol, double atol) {
        IntegrationOptions o;
        o.rtol = rtol;
        o.atol = atol;
        return samples_array(integrate(p, {init[0], init[1], init[2]}, t_end, o));
      },
      py::arg("params"), py::arg("init"), py::arg("t_end"), py::arg("rtol") = 1e-9,
      py::arg("atol") = 1e-12);
  m.def(
      "phase_portrait",
      [](const ModelParams& p, double t_end, double rtol, double atol) {
        IntegrationOptions o;
        o.rtol = rtol;
        o.atol = atol;
        py::list out;
        for (const Trajectory& t : phase_portrait(p, t_end, o)) out.append(samples_array(t));
        return out;
      },
      py::arg("params"), py::arg("t_end"), py::arg("rtol") = 1e-9, py::arg("atol") = 1e-12);

  py::class_<BifurcationPoint>(m, "BifurcationPoint")
      .def_property_readonly("kind", [](const BifurcationPoint& b) { return std::string(to_string(b.kind)); })
      .def_readonly("gamma", &BifurcationPoint::gamma)
      .def_readonly("I", &BifurcationPoint::I)
      .def_readonly("R0", &BifurcationPoint::R0);

  m.def("gamma_of_I", &gamma_of_I);
  m.def("locate_transcritical", &locate_transcritical);
  m.def("locate_saddle_node", &locate_saddle_node);
  m.def("locate_hopf", [](const ModelParams& p) { return locate_hopf(p).point; });
  m.def("locate_bifurcations", [](const ModelParams& p) { return locate_bifurcations(p).ordered(); });
  m.def("classify_regime", [](const ModelParams& p, double gamma) {
    return classify_regime(locate_bifurcations(p), gamma).id;
  });

  m.def("find_stable_cycle", [](const ModelParams& p) -> py::object {
    const auto c = find_stable_cycle(p);
    if (!c) return py::none();
    return py::dict(py::arg("period") = c->period, py::arg("max_I") = c->max_I(),
                    py::arg("points") = c->points);
  });
  m.def("find_unstable_cycle", [](const ModelParams& p) -> py::object {
    const auto c = find_unstable_cycle(p);
    if (!c) return py::none();
    return py::dict(py::arg("period") = c->period, py::arg("max_I") = c->max_I(),
                    py::arg("points") = c->points);
  });

  m.def("run_builtin_scenario", [](const ModelParams& p) {
    return report_dict(run_scenario(p, builtin_schedule(), builtin_initial_state()));
  });
  m.def("run_hysteresis_demo", [](const ModelParams& p) { return report_dict(run_hysteresis_demo(p)); });
}
