#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "degenwave/config.hpp"
#include "degenwave/decay_fit.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/kernel.hpp"
#include "degenwave/output.hpp"
#include "degenwave/pipeline.hpp"

namespace py = pybind11;
using namespace degenwave;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

RunConfig config_from(const std::string& text, const std::string& base_dir) { return parse_config(text, base_dir); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Degenerate wave / memory heat transmission solver";

  py::register_exception<Error>(m, "DegenwaveError", PyExc_RuntimeError);

  m.def("config_hash", [](const std::string& text, const std::string& base_dir) {
    return config_hash(config_from(text, base_dir));
  }, py::arg("config") = "", py::arg("base_dir") = "");

  m.def("check", [](const std::string& text, const std::string& base_dir) {
    return to_python(run_check(config_from(text, base_dir)));
  }, py::arg("config") = "", py::arg("base_dir") = "", "Coefficient and kernel report as a dict.");

  m.def("simulate", [](const std::string& text, const std::string& base_dir) {
    const SimulationTrace tr = run_simulation(config_from(text, base_dir));
    py::dict d;
    d["t"] = tr.times;
    d["energy"] = tr.energy;
    d["dissipation"] = tr.dissipation;
    d["y_interface"] = tr.y_interface;
    d["flux_interface"] = tr.flux_interface;
    d["config_hash"] = tr.config_hash;
    return d;
  }, py::arg("config") = "", py::arg("base_dir") = "");

  m.def("spectrum", [](const std::string& text, const std::string& base_dir) {
    const SpectrumResult r = run_spectrum(config_from(text, base_dir));
    py::dict d;
    d["eigenvalues"] = Eigen::VectorXcd(r.spectrum.eigenvalues);
    d["abscissa"] = r.spectrum.abscissa;
    d["max_residual"] = r.spectrum.max_residual;
    d["band_damping"] = r.band_damping;
    d["dof"] = r.dof;
    return d;
  }, py::arg("config") = "", py::arg("base_dir") = "");

  m.def("resolvent", [](const std::string& text, const std::string& base_dir) {
    return to_python(to_json(run_resolvent(config_from(text, base_dir))));
  }, py::arg("config") = "", py::arg("base_dir") = "");

  m.def("fit_decay", [](const std::vector<double>& t, const std::vector<double>& energy, double t_lo, double t_hi,
                        const std::string& kind) {
    return to_python(to_json(fit_decay(t, energy, t_lo, t_hi, parse_decay_kind(kind))));
  }, py::arg("t"), py::arg("energy"), py::arg("t_lo"), py::arg("t_hi"), py::arg("kind") = "exponential");

  m.def("kernel_gap", [](double k, double lambda) { return kernel_gap(MemoryKernel::exponential(k), lambda); },
        py::arg("k"), py::arg("lam"));
}
