// Python bindings. Records and configurations cross the boundary as JSON text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fdsim/evolution.hpp"
#include "fdsim/lie.hpp"
#include "fdsim/models.hpp"
#include "fdsim/runner.hpp"

namespace py = pybind11;
using namespace fdsim;

namespace {

using Terms = std::vector<std::pair<std::string, double>>;

PyObject* g_error_type = nullptr;

AlgebraElement element(const Terms& terms) {
  return AlgebraElement::from_labels(terms);
}

Terms terms_of(const AlgebraElement& a) {
  Terms out;
  for (const auto& [p, c] : a.terms()) out.emplace_back(p.label(), c);
  return out;
}

std::vector<std::string> labels(const std::vector<PauliString>& strings) {
  std::vector<std::string> out;
  for (const auto& p : strings) out.push_back(p.label());
  return out;
}

ModelSpec model_spec(const std::string& name, int n,
                     const std::map<std::string, std::vector<double>>& couplings,
                     const std::string& boundary) {
  ModelSpec s;
  s.name = name;
  s.n = n;
  s.couplings = couplings;
  s.boundary = boundary_from_string(boundary);
  return s;
}

py::dict slope_dict(const SlopeReport& r) {
  py::dict d;
  d["order"] = r.order;
  d["slope"] = r.slope;
  d["intercept"] = r.intercept;
  d["points"] = r.points;
  d["saturated"] = r.saturated;
  d["s"] = r.s;
  d["errors"] = r.errors;
  return d;
}

RunConfig config_of(const std::string& config_json) {
  return config_from_json(Json::parse(config_json));
}

}  // namespace

PYBIND11_MODULE(_fdsim, m) {
  m.doc() = "Fixed-depth Hamiltonian simulation via Cartan decomposition";

  g_error_type = PyErr_NewException("fdsim._fdsim.FdsimError", PyExc_RuntimeError, nullptr);
  m.add_object("FdsimError", py::handle(g_error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(g_error_type)(e.what());
      inst.attr("kind") = to_string(e.kind());
      inst.attr("exit_status") = exit_status(e.kind());
      PyErr_SetObject(g_error_type, inst.ptr());
    } catch (const Json::exception& e) {
      py::object inst = py::reinterpret_borrow<py::object>(g_error_type)(e.what());
      inst.attr("kind") = "config";
      inst.attr("exit_status") = exit_status(ErrorKind::config);
      PyErr_SetObject(g_error_type, inst.ptr());
    }
  });

  m.def("pauli_mul", [](const std::string& p, const std::string& q) {
    const PauliProduct r = pauli_mul(parse_label(p), parse_label(q));
    return py::make_tuple(r.phase_power, r.string.label());
  }, py::arg("p"), py::arg("q"), "Product P Q as (k, R) with P Q = i^k R.");

  m.def("bracket_strings", [](const std::string& p, const std::string& q) -> py::object {
    const auto r = bracket_strings(parse_label(p), parse_label(q));
    if (!r) return py::none();
    return py::make_tuple(r->coeff, r->string.label());
  }, py::arg("p"), py::arg("q"), "-i[P, Q] as (coeff, R), or None when P and Q commute.");

  m.def("bracket", [](const Terms& a, const Terms& b) {
    return terms_of(bracket(element(a), element(b)));
  }, py::arg("a"), py::arg("b"));

  m.def("y_parity", [](const std::string& p) {
    return y_parity(parse_label(p)) == Parity::odd ? "odd" : "even";
  }, py::arg("p"));

  m.def("model_names", &model_names);

  m.def("build_model", [](const std::string& name, int n,
                          const std::map<std::string, std::vector<double>>& couplings,
                          const std::string& boundary) {
    return terms_of(build_model(model_spec(name, n, couplings, boundary)));
  }, py::arg("name"), py::arg("n"), py::arg("couplings") = std::map<std::string, std::vector<double>>{},
     py::arg("boundary") = "open");

  m.def("cartan_decompose", [](const Terms& hamiltonian, std::size_t dla_cap) {
    const CartanSplit s = cartan_decompose(element(hamiltonian), dla_cap);
    py::dict d;
    d["n"] = s.n;
    d["dla_dim"] = s.dla_dim;
    d["k"] = labels(s.k_basis);
    d["h"] = labels(s.h_basis);
    d["mtilde"] = labels(s.mtilde_basis);
    d["relations_ok"] = verify_cartan_relations(s).ok();
    return d;
  }, py::arg("hamiltonian"), py::arg("dla_cap") = kDefaultDlaCap);

  m.def("truncation_slope", [](const Terms& a, const Terms& b, int order, double s_min,
                               double s_max, int points) {
    const auto grid = geometric_grid(s_min, s_max, points);
    return slope_dict(truncation_slope(element(a), element(b), order, grid));
  }, py::arg("a"), py::arg("b"), py::arg("order"), py::arg("s_min") = 1e-3,
     py::arg("s_max") = 1e-1, py::arg("points") = 7);

  m.def("trotter_sweep", [](const Terms& a, const Terms& b, double t, const std::vector<int>& steps) {
    const TrotterSweep s = trotter_sweep(element(a), element(b), t, steps);
    py::dict d;
    d["t"] = s.t;
    d["steps"] = s.steps;
    d["err_uncorrected"] = s.err_uncorrected;
    d["err_corrected"] = s.err_corrected;
    d["fit_uncorrected"] = slope_dict(s.fit_uncorrected);
    d["fit_corrected"] = slope_dict(s.fit_corrected);
    return d;
  }, py::arg("a"), py::arg("b"), py::arg("t"), py::arg("steps"));

  m.def("default_config", [] { return to_json(RunConfig{}).dump(); });

  m.def("config_hash", [](const std::string& config_json) {
    return config_hash(config_of(config_json));
  }, py::arg("config_json"));

  // Pipeline failures are reported inside the record, not raised.
  m.def("run_decompose", [](const std::string& config_json) {
    RunConfig c = config_of(config_json);
    py::gil_scoped_release release;
    return to_json(run_decompose(c)).dump();
  }, py::arg("config_json"));

  m.def("run_error_curve", [](const std::string& config_json) {
    RunConfig c = config_of(config_json);
    py::gil_scoped_release release;
    return to_json(run_error_curve(c)).dump();
  }, py::arg("config_json"));

  m.def("record_exit_status", [](const std::string& record_json) {
    return exit_status(record_from_json(Json::parse(record_json)));
  }, py::arg("record_json"));
}
