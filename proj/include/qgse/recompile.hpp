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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgse/circuit.hpp"
#include "qgse/circuits.hpp"
#include "qgse/state.hpp"

namespace qgse {

enum class GradientMethod { kParameterShift, kFiniteDifference };

struct CompileConfig {
  int max_iterations = 500;
  double learning_rate = 0.05;  // cosine-decayed to zero over max_iterations
  int restarts = 3;
  std::uint64_t seed = 0;
  GradientMethod gradient = GradientMethod::kParameterShift;
  double fd_step = 1e-5;
  /// compile_series only: start step k from the solution of step k - 1.
  bool warm_start = false;
  int threads = 1;
};

struct CompilationResult {
  std::vector<double> parameters;
  double objective = 0.0;
  double initial_objective = 0.0;
  double fidelity = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
};

/// ||target - ansatz(params)|0..0>||^2 = 2 - 2 Re<target|ansatz>.
double compile_objective(const StateVector& target, const Circuit& ansatz,
                         std::span<const double> params);

/// Objective gradient. Parameter shift evaluates dU/dθ = U(θ + π)/2 for
/// each half-angle rotation inside one forward/backward sweep; only
/// uncontrolled rotations may carry parameters.
std::vector<double> objective_gradient(const StateVector& target, const Circuit& ansatz,
                                       std::span<const double> params,
                                       GradientMethod method = GradientMethod::kParameterShift,
                                       double fd_step = 1e-5);

/// Best of config.restarts Adam runs from uniform [-π, π] starts.
CompilationResult compile_state(const StateVector& target, const Circuit& ansatz,
                                const CompileConfig& config);

/// A single Adam run from the given parameters.
CompilationResult compile_state_from(const StateVector& target, const Circuit& ansatz,
                                     const CompileConfig& config, std::vector<double> initial);

struct SeriesCompilation {
  AnsatzSpec spec;
  std::vector<CompilationResult> steps;
  double mean_fidelity = 0.0;
  double min_fidelity = 0.0;
  double max_fidelity = 0.0;
};

/// Independent compile_state per target, each with config.seed.
SeriesCompilation compile_series(std::span<const StateVector> targets, const Ansatz& ansatz,
                                 const CompileConfig& config);

nlohmann::json to_json(const SeriesCompilation& s);
SeriesCompilation series_compilation_from_json(const nlohmann::json& j);

}  // namespace qgse
