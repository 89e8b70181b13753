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

#include "qgse/cli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "qgse/chem.hpp"
#include "qgse/circuits.hpp"
#include "qgse/dense.hpp"
#include "qgse/pauli_json.hpp"
#include "qgse/qcels.hpp"
#include "qgse/qcm4.hpp"
#include "qgse/recompile.hpp"

namespace qgse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

template <class Fn>
void write_stream(const fs::path& path, Fn&& fn) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  fn(f);
}

// ---- configuration ------------------------------------------------------

bool same_kind(const json& def, const json& v) {
  if (def.is_null()) return true;
  if (def.is_number_float()) return v.is_number();
  // Every integer setting is a count, a seed or a size.
  if (def.is_number_integer()) return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  return def.type() == v.type();
}

void merge_checked(json& target, const json& user, const std::string& where) {
  if (!user.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, value] : user.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!target.contains(key)) throw InputError("unknown config key '" + path + "'");
    json& slot = target[key];
    if (slot.is_object()) {
      merge_checked(slot, value, path);
    } else if (!same_kind(slot, value)) {
      throw InputError("config key '" + path + "' has the wrong type");
    } else {
      slot = value;
    }
  }
}

fs::path absolute_from(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

// ---- problem assembly ---------------------------------------------------

struct Source {
  PauliSum h;
  std::optional<FermionIntegrals> integrals;
};

Source load_source(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("no such file: " + path.string());
  if (path.extension() == ".json") {
    try {
      return {pauli_sum_from_json(read_json_file(path)), std::nullopt};
    } catch (const json::exception& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }
  FermionIntegrals fi = read_fcidump(path);
  return {jordan_wigner(fi), std::move(fi)};
}

std::uint64_t parse_mask(const std::string& text) {
  std::string digits = text;
  if (digits.rfind("0b", 0) == 0) digits = digits.substr(2);
  if (digits.empty() || digits.size() > 64 || digits.find_first_not_of("01") != std::string::npos) {
    throw InputError("bad basis mask '" + text + "'");
  }
  return std::stoull(digits, nullptr, 2);
}

struct Sector {
  double energy = 0.0;
  Eigen::VectorXcd vector;
};

// Lowest eigenpair of h restricted to basis states accepted by `keep`.
Sector sector_ground(const PauliSum& h, const std::function<bool(std::uint64_t)>& keep) {
  const Eigen::MatrixXcd m = to_dense(h);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index b = 0; b < m.rows(); ++b) {
    if (keep(static_cast<std::uint64_t>(b))) idx.push_back(b);
  }
  if (idx.empty()) throw std::runtime_error("empty symmetry sector");
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = m(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
  Sector s{es.eigenvalues()(0), Eigen::VectorXcd::Zero(m.rows())};
  for (Eigen::Index a = 0; a < k; ++a) s.vector(idx[static_cast<std::size_t>(a)]) = es.eigenvectors()(a, 0);
  return s;
}

struct Reduced {
  PauliSum h;
  std::function<StateVector(const StateVector&)> map_state;
  std::function<bool(std::uint64_t)> sector;  // physical basis states of the reduced register
  json info;
};

// Electron counts fixed by the integrals, or nothing for a bare operator.
std::function<bool(std::uint64_t)> electron_sector(const FermionIntegrals& fi) {
  const int n_alpha = (fi.nelec() + fi.ms2()) / 2, n_beta = (fi.nelec() - fi.ms2()) / 2;
  std::uint64_t alpha = 0;
  for (int p = 0; p < fi.norb(); ++p) alpha |= std::uint64_t{1} << (2 * p);
  return [=](std::uint64_t b) {
    return std::popcount(b & alpha) == n_alpha && std::popcount(b & ~alpha) == n_beta;
  };
}

Reduced reduce(const Source& src, const std::string& mode) {
  Reduced r;
  r.info = {{"reduction", mode}, {"original_qubits", src.h.n_qubits()}};
  if (mode == "none") {
    r.h = src.h;
    r.map_state = [](const StateVector& s) { return s; };
    if (src.integrals) {
      r.sector = electron_sector(*src.integrals);
    } else {
      r.sector = [](std::uint64_t) { return true; };
    }
    return r;
  }
  if (!src.integrals) throw InputError("reduction '" + mode + "' needs an FCIDUMP input");
  const FermionIntegrals& fi = *src.integrals;
  const Determinant hf = hartree_fock_determinant(fi.norb(), fi.nelec(), fi.ms2());
  if (mode == "taper_full" || mode == "taper_particle_spin") {
    const auto rep = taper_z2(src.h, hf, mode == "taper_full" ? TaperMode::kFullKernel : TaperMode::kParticleSpin);
    r.h = rep.reduced;
    r.map_state = [rep](const StateVector& s) { return taper_state(rep, s); };
    r.sector = [](std::uint64_t) { return true; };
    json gens = json::array();
    for (const auto& g : rep.generators) gens.push_back(g.to_string());
    r.info["generators"] = gens;
    r.info["signs"] = rep.signs;
    r.info["kept_qubits"] = rep.kept_qubits;
    return r;
  }
  if (mode == "alpha_only") {
    if (fi.ms2() != fi.nelec()) throw InputError("alpha_only needs MS2 equal to NELEC");
    std::vector<std::pair<int, int>> pinned;
    for (int p = 0; p < fi.norb(); ++p) pinned.emplace_back(2 * p + 1, 0);
    const auto proj = project_qubits(src.h, pinned);
    r.h = proj.reduced;
    const std::vector<int> kept = proj.kept_qubits;
    std::uint64_t beta = 0;
    for (int p = 0; p < fi.norb(); ++p) beta |= std::uint64_t{1} << (2 * p + 1);
    r.map_state = [kept, beta](const StateVector& s) {
      std::vector<cplx> amps(std::size_t{1} << kept.size());
      double outside = 0.0;
      for (std::size_t b = 0; b < s.dim(); ++b) {
        if (b & beta) {
          outside += std::norm(s[b]);
        } else {
          amps[compress_mask(b, kept)] = s[b];
        }
      }
      if (outside > 1e-12) throw InputError("initial state occupies beta orbitals");
      return StateVector::from_amplitudes(std::move(amps), true);
    };
    const int n_alpha = fi.nelec();
    r.sector = [n_alpha](std::uint64_t b) { return std::popcount(b) == n_alpha; };
    r.info["kept_qubits"] = kept;
    return r;
  }
  throw InputError("unknown reduction '" + mode + "'");
}

StateVector full_register_state(const json& spec, const Source& src, double threshold) {
  const std::string kind = spec.at("kind").get<std::string>();
  const int n = src.h.n_qubits();
  if (kind == "hf") {
    if (!src.integrals) throw InputError("initial_state 'hf' needs an FCIDUMP input");
    const auto& fi = *src.integrals;
    return StateVector::basis(n, hartree_fock_determinant(fi.norb(), fi.nelec(), fi.ms2()).mask);
  }
  if (kind == "ci") {
    if (spec.at("path").is_null()) throw InputError("initial_state 'ci' needs a path");
    DeterminantList dl;
    try {
      dl = determinants_from_json(read_json_file(spec.at("path").get<std::string>()));
    } catch (const json::exception& e) {
      throw InputError(std::string("determinant file: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("determinant file: ") + e.what());
    }
    if (2 * dl.norb != n) throw InputError("determinant file does not match the Hamiltonian width");
    return ci_initial_state(dl.dets, n, threshold);
  }
  if (kind == "basis") {
    const std::string mask = spec.at("mask").is_null() ? "0b0" : spec.at("mask").get<std::string>();
    const std::uint64_t m = parse_mask(mask);
    if (n < 64 && (m >> n) != 0) throw InputError("basis mask wider than the register");
    return StateVector::basis(n, m);
  }
  throw InputError("unknown initial_state kind '" + kind + "'");
}

}  // namespace

// ---- public: configuration ------------------------------------------------

const json& config_defaults() {
  static const json defaults = {
      {"schema_version", kSchemaVersion},
      {"hamiltonian", nullptr},
      {"reduction", "none"},
      {"initial_state", {{"kind", nullptr}, {"path", nullptr}, {"threshold", 0.03}, {"mask", nullptr}}},
      {"seed", 0},
      {"spc", 100},
      {"mode", "exact"},
      {"threads", 1},
      {"qcels", {{"n_steps", 33}, {"tau", nullptr}, {"trotter_steps", 0}, {"depolarizing", 0.0}, {"grid_points", 20001}}},
      {"recompile",
       {{"layers", 6},
        {"max_iterations", 500},
        {"learning_rate", 0.05},
        {"restarts", 3},
        {"warm_start", false},
        {"gradient", "parameter_shift"},
        {"compilation", nullptr}}},
      {"qcm4",
       {{"threshold", 0.001},
        {"filter", true},
        {"resamples", 500},
        {"term_cap", 500000},
        {"grouping", "full"},
        {"allocation", "uniform"},
        {"formula", "c2_cubed"},
        {"depolarizing", 0.0}}},
  };
  return defaults;
}

json resolve_config(const json& user, const Overrides& overrides, const fs::path& base_dir) {
  json cfg = config_defaults();
  merge_checked(cfg, user, "");
  if (cfg.at("schema_version").get<int>() != kSchemaVersion) {
    throw InputError("config schema_version " + cfg.at("schema_version").dump() + " is not supported");
  }
  if (overrides.seed) cfg["seed"] = *overrides.seed;
  if (overrides.spc) cfg["spc"] = *overrides.spc;
  if (overrides.mode) cfg["mode"] = *overrides.mode;
  if (overrides.threads) cfg["threads"] = *overrides.threads;
  if (cfg.at("threads").get<int>() < 1) throw InputError("threads must be >= 1");

  if (cfg.at("hamiltonian").is_null()) throw InputError("config needs 'hamiltonian'");
  if (!cfg.at("hamiltonian").is_string()) throw InputError("'hamiltonian' must be a path");
  cfg["hamiltonian"] = absolute_from(base_dir, cfg["hamiltonian"].get<std::string>()).string();
  auto& init = cfg["initial_state"];
  if (!init.at("path").is_null()) init["path"] = absolute_from(base_dir, init["path"].get<std::string>()).string();
  auto& comp = cfg["recompile"]["compilation"];
  if (!comp.is_null()) comp = absolute_from(base_dir, comp.get<std::string>()).string();
  if (init.at("kind").is_null()) {
    init["kind"] = fs::path(cfg["hamiltonian"].get<std::string>()).extension() == ".json" ? "basis" : "hf";
  }
  return cfg;
}

json load_config(const fs::path& path, const Overrides& overrides) {
  return resolve_config(read_json_file(path), overrides, fs::absolute(path).parent_path());
}

Problem build_problem(const json& cfg) {
  const Source src = load_source(cfg.at("hamiltonian").get<std::string>());
  const Reduced red = reduce(src, cfg.at("reduction").get<std::string>());
  const json& init = cfg.at("initial_state");
  const double threshold = init.at("threshold").get<double>();
  const std::string kind = init.at("kind").get<std::string>();

  Problem p{red.h, StateVector(red.h.n_qubits()), src.h.n_qubits(), red.info};
  p.info["qubits"] = red.h.n_qubits();
  p.info["terms"] = red.h.size();
  p.info["initial_state"] = kind;

  const bool dense = red.h.n_qubits() <= kMaxDenseQubits;
  std::optional<Sector> ground;
  if (dense) {
    ground = sector_ground(red.h, red.sector);
    p.info["reference_energy"] = ground->energy;
  }
  if (kind == "ground_threshold") {
    if (!ground) throw InputError("ground_threshold needs a register within the dense cap");
    std::vector<cplx> amps(static_cast<std::size_t>(ground->vector.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const cplx a = ground->vector(static_cast<Eigen::Index>(i));
      amps[i] = std::abs(a) > threshold ? a : cplx{0.0, 0.0};
    }
    p.psi = StateVector::from_amplitudes(std::move(amps), true);
  } else {
    p.psi = red.map_state(full_register_state(init, src, threshold));
  }
  if (ground) {
    cplx ov = 0.0;
    for (std::size_t i = 0; i < p.psi.dim(); ++i) ov += std::conj(ground->vector(static_cast<Eigen::Index>(i))) * p.psi[i];
    p.info["ground_fidelity"] = std::norm(ov);
  }
  return p;
}

void require_finite(const json& j, const std::string& where) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) throw std::runtime_error("non-finite value at " + where);
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) require_finite(v, where + "." + k);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) require_finite(j[i], where + "[" + std::to_string(i) + "]");
  }
}

// ---- public: commands -----------------------------------------------------

namespace {

json results_header(const std::string& command, const json& cfg, const Problem& p) {
  json stored = cfg;
  stored.erase("threads");  // parallelism never changes results
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"seed", cfg.at("seed")},
          {"mode", cfg.at("mode")},
          {"n_qubits", p.h.n_qubits()},
          {"original_qubits", p.original_qubits},
          {"problem", p.info},
          {"config", stored}};
}

void finish(const fs::path& out, const json& cfg, const json& results) {
  require_finite(results);
  write_json(out / "config.json", cfg);
  write_json(out / "results.json", results);
}

CompileConfig compile_config(const json& cfg) {
  const json& r = cfg.at("recompile");
  CompileConfig c;
  c.max_iterations = r.at("max_iterations").get<int>();
  c.learning_rate = r.at("learning_rate").get<double>();
  c.restarts = r.at("restarts").get<int>();
  c.warm_start = r.at("warm_start").get<bool>();
  c.seed = cfg.at("seed").get<std::uint64_t>();
  c.threads = cfg.at("threads").get<int>();
  const std::string g = r.at("gradient").get<std::string>();
  if (g == "parameter_shift") {
    c.gradient = GradientMethod::kParameterShift;
  } else if (g == "finite_difference") {
    c.gradient = GradientMethod::kFiniteDifference;
  } else {
    throw InputError("unknown gradient '" + g + "'");
  }
  return c;
}

int layers_of(const json& cfg) {
  const int l = cfg.at("recompile").at("layers").get<int>();
  if (l < 1) throw InputError("recompile.layers must be >= 1");
  return l;
}

int steps_of(const json& cfg) {
  const int n = cfg.at("qcels").at("n_steps").get<int>();
  if (n < 2) throw InputError("qcels.n_steps must be >= 2");
  return n;
}

double tau_of(const json& cfg, const ScaledHamiltonian& sh, const StateVector& psi) {
  const json& t = cfg.at("qcels").at("tau");
  if (t.is_null()) return choose_grid(sh, psi, steps_of(cfg));
  if (!t.is_number() || !(t.get<double>() > 0.0)) throw InputError("qcels.tau must be a positive number");
  return t.get<double>();
}

json fidelity_summary(const SeriesCompilation& s) {
  json f = json::array();
  for (const auto& step : s.steps) f.push_back(step.fidelity);
  return {{"n_qubits", s.spec.n_qubits},
          {"layers", s.spec.layers},
          {"n_parameters", s.spec.n_parameters},
          {"two_qubit_gates", s.spec.two_qubit_gates},
          {"mean_fidelity", s.mean_fidelity},
          {"min_fidelity", s.min_fidelity},
          {"max_fidelity", s.max_fidelity},
          {"fidelities", f}};
}

void write_fidelity_csv(std::ostream& os, const SeriesCompilation& s, double tau) {
  os << "n,t,fidelity,objective,iterations\n" << std::setprecision(17);
  for (std::size_t k = 0; k < s.steps.size(); ++k) {
    os << k << ',' << static_cast<double>(k) * tau << ',' << s.steps[k].fidelity << ',' << s.steps[k].objective << ','
       << s.steps[k].iterations << '\n';
  }
}

SeriesCompilation compile_or_load(const json& cfg, const ScaledHamiltonian& sh, const StateVector& psi, double tau,
                                  const Ansatz& ansatz) {
  const int n = steps_of(cfg);
  const json& path = cfg.at("recompile").at("compilation");
  if (!path.is_null()) {
    SeriesCompilation s;
    try {
      s = series_compilation_from_json(read_json_file(path.get<std::string>()));
    } catch (const json::exception& e) {
      throw InputError(std::string("compilation file: ") + e.what());
    }
    if (s.spec.n_qubits != ansatz.spec.n_qubits || s.spec.layers != ansatz.spec.layers ||
        static_cast<int>(s.steps.size()) != n) {
      throw InputError("compilation file does not match the ansatz or the number of steps");
    }
    return s;
  }
  const auto targets = hadamard_targets(sh, psi, tau, n);
  return compile_series(targets, ansatz, compile_config(cfg));
}

}  // namespace

json run_qcels(const json& cfg, const fs::path& out) {
  const Problem p = build_problem(cfg);
  const ScaledHamiltonian sh = scale(p.h, NormPolicy::kSpectralOrOneNorm);
  const double tau = tau_of(cfg, sh, p.psi);
  const int n = steps_of(cfg);
  const json& q = cfg.at("qcels");

  AcquireOptions opt;
  try {
    opt.mode = acquire_mode_from_name(cfg.at("mode").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  opt.spc = cfg.at("spc").get<std::size_t>();
  opt.seed = cfg.at("seed").get<std::uint64_t>();
  opt.threads = cfg.at("threads").get<int>();
  opt.depolarizing = q.at("depolarizing").get<double>();
  opt.trotter_steps = q.at("trotter_steps").get<int>();
  FitOptions fo;
  fo.grid_points = q.at("grid_points").get<int>();

  fs::create_directories(out);
  json results = results_header("qcels", cfg, p);
  std::optional<Ansatz> ansatz;
  std::optional<SeriesCompilation> compiled;
  int depth = 0;
  if (opt.mode == AcquireMode::kRecompiled) {
    ansatz = hea_ansatz(p.h.n_qubits() + 1, layers_of(cfg));
    compiled = compile_or_load(cfg, sh, p.psi, tau, *ansatz);
    opt.ansatz = &ansatz->circuit;
    opt.compiled = &*compiled;
    depth = two_qubit_depth(ansatz->circuit);
    write_json(out / "compilation.json", to_json(*compiled));
    results["recompile"] = fidelity_summary(*compiled);
  } else {
    depth = two_qubit_depth(trotter_step(sh.scaled, tau, {.controlled = true}));
  }

  const OverlapSeries series = acquire(sh, p.psi, tau, n, opt);
  const QcelsResult fitted = fit(series, sh, fo);
  const double exact_energy =
      opt.mode == AcquireMode::kExact ? fitted.energy : fit(acquire(sh, p.psi, tau, n, {}), sh, fo).energy;

  write_stream(out / "overlap.csv", [&](std::ostream& os) { write_overlap_csv(os, series); });
  write_stream(out / "objective.csv", [&](std::ostream& os) { write_objective_csv(os, fitted); });

  results["spc"] = opt.mode == AcquireMode::kExact ? 0 : opt.spc;
  results["two_qubit_depth"] = depth;
  results["energy"] = fitted.energy;
  results["qcels"] = to_json(fitted);
  results["qcels"]["h0"] = sh.h0;
  results["qcels"]["h1"] = sh.h1;
  results["qcels"]["tau"] = tau;
  results["qcels"]["n_steps"] = n;
  results["qcels"]["exact_mode_energy"] = exact_energy;
  finish(out, cfg, results);
  return results;
}

json run_recompile(const json& cfg, const fs::path& out) {
  const Problem p = build_problem(cfg);
  const ScaledHamiltonian sh = scale(p.h, NormPolicy::kSpectralOrOneNorm);
  const double tau = tau_of(cfg, sh, p.psi);
  const Ansatz ansatz = hea_ansatz(p.h.n_qubits() + 1, layers_of(cfg));
  const auto targets = hadamard_targets(sh, p.psi, tau, steps_of(cfg));
  const SeriesCompilation s = compile_series(targets, ansatz, compile_config(cfg));

  fs::create_directories(out);
  write_json(out / "compilation.json", to_json(s));
  write_stream(out / "fidelity.csv", [&](std::ostream& os) { write_fidelity_csv(os, s, tau); });
  json results = results_header("recompile", cfg, p);
  results["spc"] = 0;
  results["two_qubit_depth"] = two_qubit_depth(ansatz.circuit);
  results["energy"] = nullptr;
  results["tau"] = tau;
  results["recompile"] = fidelity_summary(s);
  finish(out, cfg, results);
  return results;
}

json run_qcm4(const json& cfg, const fs::path& out) {
  const Problem p = build_problem(cfg);
  const json& q = cfg.at("qcm4");
  const std::string mode = cfg.at("mode").get<std::string>();
  if (mode != "exact" && mode != "shots") throw InputError("qcm4 mode must be exact or shots");
  const std::string grouping = q.at("grouping").get<std::string>();
  if (grouping != "full" && grouping != "qubitwise") throw InputError("unknown grouping '" + grouping + "'");
  const std::string allocation = q.at("allocation").get<std::string>();
  if (allocation != "uniform" && allocation != "variance_weighted") {
    throw InputError("unknown allocation '" + allocation + "'");
  }

  Qcm4Formula formula;
  try {
    formula = qcm4_formula_from_name(q.at("formula").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }

  const MomentOperators m = build_moments(p.h, q.at("threshold").get<double>(), q.at("term_cap").get<std::size_t>());
  std::optional<FilteredMoments> filtered;
  if (q.at("filter").get<bool>()) filtered = pauli_filter(m, p.psi);
  const MomentOperators& measured = filtered ? filtered->moments : m;
  const MeasurementPlan pl = plan(measured, grouping == "full" ? CommuteMode::kFull : CommuteMode::kQubitwise);

  EstimateOptions eo;
  eo.mode = mode == "shots" ? EstimateMode::kShots : EstimateMode::kExact;
  eo.spc = cfg.at("spc").get<std::size_t>();
  eo.seed = cfg.at("seed").get<std::uint64_t>();
  eo.threads = cfg.at("threads").get<int>();
  eo.depolarizing = q.at("depolarizing").get<double>();
  eo.allocation = allocation == "uniform" ? ShotAllocation::kUniform : ShotAllocation::kVarianceWeighted;
  const MomentEstimates est = estimate(pl, p.psi, eo);
  const MomentArray c = cumulants(est.moments);
  const double energy = qcm4_energy(c, 1e-10, 1e-9, formula);
  const double exact_energy = eo.mode == EstimateMode::kExact
                                  ? energy
                                  : qcm4_energy(cumulants(estimate(pl, p.psi, {}).moments), 1e-10, 1e-9, formula);

  int depth = 0;
  for (const auto& mc : pl.circuits) depth = std::max(depth, two_qubit_depth(mc.clifford));

  fs::create_directories(out);
  const json report = moment_report(m, pl, filtered ? &filtered->report : nullptr);
  write_json(out / "moment_report.json", report);
  const std::size_t resamples = q.at("resamples").get<std::size_t>();
  json boot = {{"resamples", resamples}};
  if (eo.mode == EstimateMode::kShots && resamples > 0) {
    const BootstrapResult b = bootstrap(pl, est, resamples, eo.seed, eo.threads, formula);
    write_stream(out / "bootstrap.csv", [&](std::ostream& os) { write_bootstrap_csv(os, b); });
    boot["mean"] = b.mean;
    boot["std"] = b.std;
    boot["failures"] = b.failures;
  }

  json results = results_header("qcm4", cfg, p);
  results["spc"] = eo.mode == EstimateMode::kExact ? 0 : eo.spc;
  results["two_qubit_depth"] = depth;
  results["energy"] = energy;
  results["qcm4"] = {{"moments", est.moments},
                     {"cumulants", c},
                     {"exact_mode_energy", exact_energy},
                     {"report", report},
                     {"bootstrap", boot}};
  finish(out, cfg, results);
  return results;
}

json run_ingest(const fs::path& fcidump, const std::string& reduction, const fs::path& out, std::ostream& log) {
  const Source src = load_source(fcidump);
  if (!src.integrals) throw InputError("ingest expects an FCIDUMP file");
  const Reduced red = reduce(src, reduction);

  json report = red.info;
  report["schema_version"] = kSchemaVersion;
  report["source"] = fs::absolute(fcidump).lexically_normal().string();
  report["qubits"] = red.h.n_qubits();
  report["terms"] = red.h.size();
  log << "qubits: " << src.h.n_qubits() << " -> " << red.h.n_qubits() << " (" << reduction << ")\n";
  if (src.h.n_qubits() <= kMaxDenseQubits) {
    const double before = sector_ground(src.h, electron_sector(*src.integrals)).energy;
    const double after = sector_ground(red.h, red.sector).energy;
    report["ground_energy_original"] = before;
    report["ground_energy_reduced"] = after;
    report["ground_energy_match"] = std::abs(before - after) < 1e-8;
    log << std::setprecision(12) << "ground energy: " << before << " -> " << after << '\n';
  }
  require_finite(report, "ingest");
  fs::create_directories(out);
  write_json(out / "operator.json", to_json(red.h));
  write_json(out / "ingest.json", report);
  return report;
}

std::string run_report(std::span<const fs::path> runs, const std::optional<fs::path>& out) {
  struct Row {
    std::string name, command, mode, key;
    int qubits = 0, depth = 0;
    std::size_t spc = 0;
    std::optional<double> energy;
  };
  std::vector<Row> rows;
  for (const auto& dir : runs) {
    const json r = read_json_file(dir / "results.json");
    if (!r.contains("schema_version") || r.at("schema_version") != kSchemaVersion) {
      throw InputError(dir.string() + ": schema mismatch");
    }
    Row row;
    row.name = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
    row.command = r.at("command").get<std::string>();
    row.mode = r.at("mode").get<std::string>();
    row.qubits = r.at("n_qubits").get<int>();
    row.depth = r.at("two_qubit_depth").get<int>();
    row.spc = r.at("spc").get<std::size_t>();
    if (!r.at("energy").is_null()) row.energy = r.at("energy").get<double>();
    row.key = row.command + "|" + r.at("config").at("hamiltonian").get<std::string>() + "|" +
              r.at("config").at("reduction").get<std::string>();
    rows.push_back(row);
  }
  std::map<std::string, double> reference;
  for (const auto& row : rows) {
    if (row.mode == "exact" && row.energy && !reference.contains(row.key)) reference[row.key] = *row.energy;
  }

  std::ostringstream md, csv;
  md << "| run | command | mode | qubits | 2q depth | spc | energy (Ha) | dE (Ha) |\n"
     << "|---|---|---|---|---|---|---|---|\n";
  csv << "run,command,mode,qubits,two_qubit_depth,spc,energy,delta_e\n";
  md << std::fixed << std::setprecision(8);
  csv << std::setprecision(17);
  for (const auto& row : rows) {
    std::optional<double> delta;
    if (row.energy && reference.contains(row.key)) delta = *row.energy - reference.at(row.key);
    md << "| " << row.name << " | " << row.command << " | " << row.mode << " | " << row.qubits << " | " << row.depth
       << " | " << row.spc << " | ";
    csv << row.name << ',' << row.command << ',' << row.mode << ',' << row.qubits << ',' << row.depth << ','
        << row.spc << ',';
    if (row.energy) {
      md << *row.energy;
      csv << *row.energy;
    }
    md << " | ";
    csv << ',';
    if (delta) {
      md << *delta;
      csv << *delta;
    }
    md << " |\n";
    csv << '\n';
  }
  if (out) {
    fs::create_directories(*out);
    write_text(*out / "report.md", md.str());
    write_text(*out / "report.csv", csv.str());
  }
  return md.str();
}

// ---- public: command line ---------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground-state energy estimation on a state-vector simulator", "qgse"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path;
  std::string out_dir = "qgse_out";
  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--seed", ov.seed, "Master seed");
    sub->add_option("--spc", ov.spc, "Shots per circuit");
    sub->add_option("--mode", ov.mode, "exact | shots | recompiled");
    sub->add_option("--threads", ov.threads, "Worker threads");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
  };
  CLI::App* qcels = app.add_subcommand("qcels", "Statistical phase estimation with QCELS fitting");
  CLI::App* qcm4 = app.add_subcommand("qcm4", "Fourth-order moment energy estimate");
  CLI::App* recompile = app.add_subcommand("recompile", "Compile Hadamard-test states into the ansatz");
  for (CLI::App* sub : {qcels, qcm4, recompile}) add_run_options(sub);

  CLI::App* ingest = app.add_subcommand("ingest", "FCIDUMP to qubit operator");
  std::string fcidump, reduction = "none";
  ingest->add_option("fcidump", fcidump, "FCIDUMP file")->required();
  ingest->add_option("--reduction", reduction, "none | taper_full | taper_particle_spin | alpha_only")
      ->capture_default_str();
  ingest->add_option("--out", out_dir, "Output directory")->capture_default_str();

  CLI::App* report = app.add_subcommand("report", "Summary table over run directories");
  std::vector<std::string> run_dirs;
  std::optional<std::string> report_out;
  report->add_option("runs", run_dirs, "Run directories");
  report->add_option("--out", report_out, "Write report.md and report.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (ingest->parsed()) {
      run_ingest(fcidump, reduction, out_dir, out);
    } else if (report->parsed()) {
      std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
      out << run_report(dirs, report_out ? std::optional<fs::path>(*report_out) : std::nullopt);
    } else {
      const json cfg = load_config(config_path, ov);
      json results;
      if (qcels->parsed()) {
        results = run_qcels(cfg, out_dir);
      } else if (qcm4->parsed()) {
        results = run_qcm4(cfg, out_dir);
      } else {
        results = run_recompile(cfg, out_dir);
      }
      out << std::setprecision(12) << results.at("command").get<std::string>() << ": ";
      if (results.at("energy").is_null()) {
        out << "mean fidelity " << results.at("recompile").at("mean_fidelity").get<double>();
      } else {
        out << "energy " << results.at("energy").get<double>() << " Ha";
      }
      out << " -> " << out_dir << '\n';
    }
  } catch (const InputError& e) {
    err << "qgse: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParseError& e) {
    err << "qgse: " << e.what() << '\n';
    return kExitInput;
  } catch (const json::exception& e) {
    err << "qgse: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "qgse: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace qgse::cli
