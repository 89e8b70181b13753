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

#include "qgse/recompile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qgse/parallel.hpp"
#include "qgse/rng.hpp"
#include "qgse/simulator.hpp"

namespace qgse {

namespace {

void check_widths(const StateVector& target, const Circuit& ansatz, std::span<const double> params) {
  if (target.n_qubits() != ansatz.n_qubits()) {
    throw std::invalid_argument("target has " + std::to_string(target.n_qubits()) +
                                " qubits, ansatz has " + std::to_string(ansatz.n_qubits()));
  }
  if (params.size() != static_cast<std::size_t>(ansatz.num_parameters())) {
    throw std::invalid_argument("expected " + std::to_string(ansatz.num_parameters()) +
                                " parameters, got " + std::to_string(params.size()));
  }
}

void apply_inverse(StateVector& s, const Gate& g, std::span<const double> params) {
  switch (g.kind) {
    case GateKind::kH:
    case GateKind::kCX:
    case GateKind::kCZ:
      apply_gate(s, g, params);
      return;
    case GateKind::kS: {
      Gate inv = g;
      inv.kind = GateKind::kSdg;
      apply_gate(s, inv, params);
      return;
    }
    case GateKind::kSdg: {
      Gate inv = g;
      inv.kind = GateKind::kS;
      apply_gate(s, inv, params);
      return;
    }
    default: {
      Gate inv = g;
      inv.angle = -resolve(g.angle, params);
      apply_gate(s, inv, params);
      return;
    }
  }
}

cplx overlap(const StateVector& a, const StateVector& b) { return a.inner(b); }

double objective_from_overlap(cplx ov) { return 2.0 - 2.0 * ov.real(); }

// Objective and parameter-shift gradient in one forward/backward sweep.
double sweep(const StateVector& target, const Circuit& ansatz, std::span<const double> params,
             std::vector<double>& grad) {
  StateVector phi = apply_circuit(StateVector(ansatz.n_qubits()), ansatz, params);
  const double obj = objective_from_overlap(overlap(target, phi));
  grad.assign(params.size(), 0.0);
  StateVector lambda = target;
  const auto& gates = ansatz.gates();
  for (std::size_t k = gates.size(); k-- > 0;) {
    const Gate& g = gates[k];
    apply_inverse(phi, g, params);
    if (const auto* ref = std::get_if<ParamRef>(&g.angle)) {
      if (g.kind != GateKind::kRx && g.kind != GateKind::kRz && g.kind != GateKind::kZZPhase &&
          g.kind != GateKind::kPauliExp) {
        throw std::invalid_argument("parameter shift needs an uncontrolled Pauli rotation, got '" +
                                    std::string(gate_name(g.kind)) + "'");
      }
      Gate shifted = g;
      shifted.angle = params[static_cast<std::size_t>(ref->id)] + std::numbers::pi;
      StateVector probe = phi;
      apply_gate(probe, shifted, params);
      grad[static_cast<std::size_t>(ref->id)] -= overlap(lambda, probe).real();
    }
    apply_inverse(lambda, g, params);
  }
  return obj;
}

double finite_difference(const StateVector& target, const Circuit& ansatz,
                         std::span<const double> params, double step, std::vector<double>& grad) {
  std::vector<double> p(params.begin(), params.end());
  grad.assign(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + step;
    const double up = compile_objective(target, ansatz, p);
    p[i] = keep - step;
    const double down = compile_objective(target, ansatz, p);
    p[i] = keep;
    grad[i] = (up - down) / (2.0 * step);
  }
  return compile_objective(target, ansatz, p);
}

double fidelity_of(const StateVector& target, const Circuit& ansatz, std::span<const double> params) {
  return target.fidelity(apply_circuit(StateVector(ansatz.n_qubits()), ansatz, params));
}

}  // namespace

double compile_objective(const StateVector& target, const Circuit& ansatz,
                         std::span<const double> params) {
  check_widths(target, ansatz, params);
  const StateVector out = apply_circuit(StateVector(ansatz.n_qubits()), ansatz, params);
  return objective_from_overlap(overlap(target, out));
}

std::vector<double> objective_gradient(const StateVector& target, const Circuit& ansatz,
                                       std::span<const double> params, GradientMethod method,
                                       double fd_step) {
  check_widths(target, ansatz, params);
  std::vector<double> grad;
  if (method == GradientMethod::kParameterShift) {
    sweep(target, ansatz, params, grad);
  } else {
    finite_difference(target, ansatz, params, fd_step, grad);
  }
  return grad;
}

CompilationResult compile_state_from(const StateVector& target, const Circuit& ansatz,
                                     const CompileConfig& config, std::vector<double> initial) {
  check_widths(target, ansatz, initial);
  if (config.max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  constexpr double kConverged = 1e-14;

  std::vector<double> theta = std::move(initial);
  std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0), grad;
  auto evaluate = [&](std::span<const double> p) {
    return config.gradient == GradientMethod::kParameterShift
               ? sweep(target, ansatz, p, grad)
               : finite_difference(target, ansatz, p, config.fd_step, grad);
  };

  CompilationResult best;
  best.seed = config.seed;
  int it = 0;
  for (;; ++it) {
    const double obj = evaluate(theta);
    if (!std::isfinite(obj)) {
      throw std::runtime_error("compile_state: non-finite objective at iteration " + std::to_string(it));
    }
    if (it == 0) best.initial_objective = obj;
    if (it == 0 || obj < best.objective) {
      best.objective = obj;
      best.parameters = theta;
    }
    if (it == config.max_iterations || obj < kConverged) break;
    const double lr = config.learning_rate * 0.5 *
                      (1.0 + std::cos(std::numbers::pi * it / config.max_iterations));
    const double c1 = 1.0 - std::pow(kBeta1, it + 1), c2 = 1.0 - std::pow(kBeta2, it + 1);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      theta[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
    }
  }
  best.iterations = it;
  best.fidelity = fidelity_of(target, ansatz, best.parameters);
  return best;
}

CompilationResult compile_state(const StateVector& target, const Circuit& ansatz,
                                const CompileConfig& config) {
  if (config.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  const auto n_params = static_cast<std::size_t>(ansatz.num_parameters());
  CompilationResult best;
  for (int r = 0; r < config.restarts; ++r) {
    CounterRng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    std::vector<double> init(n_params);
    for (auto& x : init) x = std::numbers::pi * (2.0 * rng.uniform() - 1.0);
    CompilationResult res = compile_state_from(target, ansatz, config, std::move(init));
    if (r == 0 || res.objective < best.objective) best = std::move(res);
  }
  best.seed = config.seed;
  return best;
}

SeriesCompilation compile_series(std::span<const StateVector> targets, const Ansatz& ansatz,
                                 const CompileConfig& config) {
  for (const auto& t : targets) {
    if (t.n_qubits() != targets.front().n_qubits()) {
      throw std::invalid_argument("compile_series: targets differ in width");
    }
  }
  SeriesCompilation out;
  out.spec = ansatz.spec;
  out.steps.resize(targets.size());
  if (config.warm_start) {
    for (std::size_t k = 0; k < targets.size(); ++k) {
      CompilationResult res = compile_state(targets[k], ansatz.circuit, config);
      if (k > 0) {
        CompilationResult warm =
            compile_state_from(targets[k], ansatz.circuit, config, out.steps[k - 1].parameters);
        if (warm.objective < res.objective) res = std::move(warm);
      }
      out.steps[k] = std::move(res);
    }
  } else {
    parallel_for(targets.size(), config.threads, [&](std::size_t k) {
      out.steps[k] = compile_state(targets[k], ansatz.circuit, config);
    });
  }
  if (!out.steps.empty()) {
    double sum = 0.0;
    out.min_fidelity = out.max_fidelity = out.steps.front().fidelity;
    for (const auto& s : out.steps) {
      sum += s.fidelity;
      out.min_fidelity = std::min(out.min_fidelity, s.fidelity);
      out.max_fidelity = std::max(out.max_fidelity, s.fidelity);
    }
    out.mean_fidelity = sum / static_cast<double>(out.steps.size());
  }
  return out;
}

nlohmann::json to_json(const SeriesCompilation& s) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& r : s.steps) {
    steps.push_back({{"parameters", r.parameters},
                     {"objective", r.objective},
                     {"initial_objective", r.initial_objective},
                     {"fidelity", r.fidelity},
                     {"iterations", r.iterations},
                     {"seed", r.seed}});
  }
  return {{"n_qubits", s.spec.n_qubits},
          {"layers", s.spec.layers},
          {"n_parameters", s.spec.n_parameters},
          {"two_qubit_gates", s.spec.two_qubit_gates},
          {"mean_fidelity", s.mean_fidelity},
          {"min_fidelity", s.min_fidelity},
          {"max_fidelity", s.max_fidelity},
          {"steps", std::move(steps)}};
}

SeriesCompilation series_compilation_from_json(const nlohmann::json& j) {
  SeriesCompilation s;
  s.spec.n_qubits = j.at("n_qubits").get<int>();
  s.spec.layers = j.at("layers").get<int>();
  s.spec.n_parameters = j.at("n_parameters").get<int>();
  s.spec.two_qubit_gates = j.at("two_qubit_gates").get<int>();
  s.mean_fidelity = j.at("mean_fidelity").get<double>();
  s.min_fidelity = j.at("min_fidelity").get<double>();
  s.max_fidelity = j.at("max_fidelity").get<double>();
  for (const auto& js : j.at("steps")) {
    CompilationResult r;
    r.parameters = js.at("parameters").get<std::vector<double>>();
    if (r.parameters.size() != static_cast<std::size_t>(s.spec.n_parameters)) {
      throw std::invalid_argument("compilation step has the wrong parameter count");
    }
    r.objective = js.at("objective").get<double>();
    r.initial_objective = js.at("initial_objective").get<double>();
    r.fidelity = js.at("fidelity").get<double>();
    r.iterations = js.at("iterations").get<int>();
    r.seed = js.at("seed").get<std::uint64_t>();
    s.steps.push_back(std::move(r));
  }
  return s;
}

}  // namespace qgse
