// Copyright 2026 The qgse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Operators and states cross the boundary as opaque
// objects; structured results come back as plain dicts and numpy arrays.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "qgse/chem.hpp"
#include "qgse/circuits.hpp"
#include "qgse/cli.hpp"
#include "qgse/dense.hpp"
#include "qgse/pauli_json.hpp"
#include "qgse/propagator.hpp"
#include "qgse/qcels.hpp"
#include "qgse/qcm4.hpp"

namespace py = pybind11;
using namespace qgse;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

ComplexArray amplitudes_of(const StateVector& s) {
  return ComplexArray(static_cast<py::ssize_t>(s.dim()), s.amplitudes().data());
}

StateVector state_from(const ComplexArray& a, bool normalize) {
  if (a.ndim() != 1) throw py::value_error("amplitudes must be one-dimensional");
  const auto view = a.unchecked<1>();
  std::vector<cplx> amps(static_cast<std::size_t>(a.shape(0)));
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = view(static_cast<py::ssize_t>(i));
  return StateVector::from_amplitudes(std::move(amps), normalize);
}

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_python(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict qcels_run(const PauliSum& h, const StateVector& psi, int n_steps, std::optional<double> tau,
                   const std::string& mode, std::size_t spc, std::uint64_t seed, int threads, int grid_points) {
  const ScaledHamiltonian sh = scale(h, NormPolicy::kSpectralOrOneNorm);
  const double t = tau ? *tau : choose_grid(sh, psi, n_steps);
  AcquireOptions o;
  o.mode = acquire_mode_from_name(mode);
  if (o.mode == AcquireMode::kRecompiled) throw py::value_error("use the CLI for recompiled runs");
  o.spc = spc;
  o.seed = seed;
  o.threads = threads;
  FitOptions fo;
  fo.grid_points = grid_points;
  OverlapSeries series;
  QcelsResult r;
  {
    py::gil_scoped_release release;
    series = acquire(sh, psi, t, n_steps, o);
    r = fit(series, sh, fo);
  }
  ComplexArray z(static_cast<py::ssize_t>(series.z.size()));
  auto zv = z.mutable_unchecked<1>();
  for (std::size_t k = 0; k < series.z.size(); ++k) zv(static_cast<py::ssize_t>(k)) = series.z[k];
  py::dict out;
  out["energy"] = r.energy;
  out["theta"] = r.theta;
  out["objective"] = r.objective;
  out["tau"] = t;
  out["h0"] = sh.h0;
  out["h1"] = sh.h1;
  out["z"] = z;
  out["stderr_re"] = series.stderr_re;
  out["stderr_im"] = series.stderr_im;
  return out;
}

py::dict qcm4_run(const PauliSum& h, const StateVector& psi, double threshold, bool filter, const std::string& mode,
                  std::size_t spc, std::uint64_t seed, int threads, std::size_t resamples,
                  const std::string& formula_name) {
  if (mode != "exact" && mode != "shots") throw py::value_error("mode must be 'exact' or 'shots'");
  const Qcm4Formula formula = qcm4_formula_from_name(formula_name);
  py::dict out;
  py::gil_scoped_release release;
  const MomentOperators m = build_moments(h, threshold);
  const MomentOperators used = filter ? pauli_filter(m, psi).moments : m;
  const MeasurementPlan pl = plan(used);
  EstimateOptions o;
  o.mode = mode == "shots" ? EstimateMode::kShots : EstimateMode::kExact;
  o.spc = spc;
  o.seed = seed;
  o.threads = threads;
  const MomentEstimates est = estimate(pl, psi, o);
  const MomentArray c = cumulants(est.moments);
  const double energy = qcm4_energy(c, 1e-10, 1e-9, formula);
  std::optional<BootstrapResult> boot;
  if (o.mode == EstimateMode::kShots && resamples > 0) boot = bootstrap(pl, est, resamples, seed, threads, formula);

  py::gil_scoped_acquire acquire;
  out["energy"] = energy;
  out["moments"] = est.moments;
  out["cumulants"] = c;
  out["circuits"] = pl.circuits.size();
  out["terms"] = pl.term_count();
  if (boot) {
    out["bootstrap_std"] = boot->std;
    out["bootstrap_mean"] = boot->mean;
    out["bootstrap_failures"] = boot->failures;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ground-state energy estimation on a state-vector simulator";

  py::register_exception<cli::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TermCapExceeded>(m, "TermCapExceeded", PyExc_RuntimeError);

  py::class_<PauliSum>(m, "PauliSum")
      .def_static(
          "from_json", [](const std::string& text) { return pauli_sum_from_json(nlohmann::json::parse(text)); },
          py::arg("text"))
      .def_static(
          "from_terms",
          [](int n_qubits, const std::vector<std::pair<std::string, cplx>>& terms) {
            std::vector<PauliTerm> t;
            for (const auto& [s, c] : terms) t.push_back({PauliString::parse(s), c});
            return PauliSum(n_qubits, std::move(t));
          },
          py::arg("n_qubits"), py::arg("terms"))
      .def_property_readonly("n_qubits", &PauliSum::n_qubits)
      .def("__len__", &PauliSum::size)
      .def("to_json", [](const PauliSum& a) { return to_json(a).dump(1); })
      .def("terms",
           [](const PauliSum& a) {
             std::vector<std::pair<std::string, cplx>> out;
             for (const auto& t : a) out.emplace_back(t.pauli.to_string(), t.coeff);
             return out;
           })
      .def("to_dense", [](const PauliSum& a) { return to_dense(a); })
      .def("ground_energy", [](const PauliSum& a) { return diagonalize(a).values(0); });

  py::class_<StateVector>(m, "StateVector")
      .def(py::init<int>(), py::arg("n_qubits"))
      .def_static("basis", &StateVector::basis, py::arg("n_qubits"), py::arg("index"))
      .def_static("from_amplitudes", &state_from, py::arg("amplitudes"), py::arg("normalize") = false)
      .def_property_readonly("n_qubits", &StateVector::n_qubits)
      .def("amplitudes", &amplitudes_of)
      .def("inner", &StateVector::inner, py::arg("other"));

  m.def("jordan_wigner_fcidump", [](const std::filesystem::path& p) { return jordan_wigner(read_fcidump(p)); },
        py::arg("path"), "Qubit Hamiltonian of an FCIDUMP file in the interleaved spin-orbital order.");
  m.def("expectation", [](const StateVector& s, const PauliSum& h) { return expectation(s, h); });
  m.def("evolve_exact", &evolve_exact, py::arg("state"), py::arg("h"), py::arg("t"),
        py::call_guard<py::gil_scoped_release>());
  m.def("std_error", &std_error, py::arg("value"), py::arg("spc"));
  m.def("cumulants", &cumulants, py::arg("moments"));
  m.def(
      "qcm4_energy",
      [](const MomentArray& c, double guard, double clamp, const std::string& formula) {
        return qcm4_energy(c, guard, clamp, qcm4_formula_from_name(formula));
      },
      py::arg("cumulants"), py::arg("guard") = 1e-10, py::arg("clamp") = 1e-9, py::arg("formula") = "c2_cubed");
  m.def(
      "ansatz_spec",
      [](int n, int layers) {
        const Ansatz a = hea_ansatz(n, layers);
        py::dict d;
        d["n_qubits"] = a.spec.n_qubits;
        d["layers"] = a.spec.layers;
        d["n_parameters"] = a.spec.n_parameters;
        d["two_qubit_gates"] = a.spec.two_qubit_gates;
        d["two_qubit_depth"] = two_qubit_depth(a.circuit);
        return d;
      },
      py::arg("n_qubits"), py::arg("layers") = 6);

  m.def("qcels", &qcels_run, py::arg("h"), py::arg("psi"), py::arg("n_steps") = 33, py::arg("tau") = py::none(),
        py::arg("mode") = "exact", py::arg("spc") = 100, py::arg("seed") = 0, py::arg("threads") = 1,
        py::arg("grid_points") = 20001, "Acquire an overlap series and fit the QCELS phase.");
  m.def("qcm4", &qcm4_run, py::arg("h"), py::arg("psi"), py::arg("threshold") = 1e-3, py::arg("filter") = true,
        py::arg("mode") = "exact", py::arg("spc") = 500, py::arg("seed") = 0, py::arg("threads") = 1,
        py::arg("resamples") = 500, py::arg("formula") = "c2_cubed", "Fourth-order cumulant energy estimate.");

  m.def(
      "resolve_config",
      [](const py::object& user, const std::filesystem::path& base_dir) {
        return to_python(cli::resolve_config(from_python(user), {}, base_dir));
      },
      py::arg("config"), py::arg("base_dir") = std::filesystem::path("."));
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"qgse"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the qgse command line in process; returns (exit code, stdout, stderr).");
}
