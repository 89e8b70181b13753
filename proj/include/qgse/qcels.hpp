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
#include <iosfwd>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgse/circuit.hpp"
#include "qgse/pauli.hpp"
#include "qgse/recompile.hpp"
#include "qgse/state.hpp"

namespace qgse {

/// H = h0 I + h1 H~, with the spectrum of H~ inside [-π/4, π/4].
struct ScaledHamiltonian {
  double h0 = 0.0;
  double h1 = 0.0;
  PauliSum scaled;
};

ScaledHamiltonian scale(const PauliSum& h, NormPolicy policy = NormPolicy::kSpectral);

/// Step τ giving two periods of the phase <ψ|H~|ψ> over n points. A phase
/// below 0.01 falls back to the period of π/4. τ is capped at kMaxTau so the
/// fit window [-π/4, π/4] never holds two aliases of one phase.
inline constexpr double kMaxTau = 2.0;
double choose_grid(const ScaledHamiltonian& sh, const StateVector& psi, int n = 33);

enum class AcquireMode { kExact, kShots, kRecompiled };
std::string_view mode_name(AcquireMode mode);
AcquireMode acquire_mode_from_name(std::string_view name);

struct AcquireOptions {
  AcquireMode mode = AcquireMode::kExact;
  /// Shots per Hadamard-test circuit. In recompiled mode 0 means exact
  /// ancilla expectations of the compiled states.
  std::size_t spc = 100;
  std::uint64_t seed = 0;
  int threads = 1;
  double depolarizing = 0.0;
  /// Shots mode: 0 uses exact controlled evolution, r > 0 uses r
  /// first-order Trotter steps per time point.
  int trotter_steps = 0;
  /// Recompiled mode: the ansatz and one compiled parameter set per t_n.
  const Circuit* ansatz = nullptr;
  const SeriesCompilation* compiled = nullptr;
};

struct OverlapSeries {
  double tau = 0.0;
  std::vector<cplx> z;
  std::vector<double> stderr_re;
  std::vector<double> stderr_im;
  std::size_t spc = 0;
  AcquireMode mode = AcquireMode::kExact;

  std::size_t size() const { return z.size(); }
};

/// Hadamard-test states (|0>|ψ> + |1> e^{-i t_n H~}|ψ>)/√2 with the ancilla
/// at qubit 0, for t_n = nτ. These are the recompilation targets.
std::vector<StateVector> hadamard_targets(const ScaledHamiltonian& sh, const StateVector& psi,
                                          double tau, int n);

/// Z_n ~ <ψ|e^{-i nτ H~}|ψ> for n = 0..n-1.
OverlapSeries acquire(const ScaledHamiltonian& sh, const StateVector& psi, double tau, int n,
                      const AcquireOptions& options);

/// Binomial standard error sqrt((1 - value^2)/spc) of a ±1 mean.
double std_error(double value, std::size_t spc);

struct FitOptions {
  int grid_points = 20001;
  double tolerance = 1e-10;
};

struct QcelsResult {
  double theta = 0.0;
  double energy = 0.0;
  double objective = 0.0;
  std::vector<double> grid_theta;
  std::vector<double> grid_objective;
};

/// f(θ) = |sum_n Z_n e^{i nτθ}|^2.
double qcels_objective(const OverlapSeries& series, double theta);

/// Grid search over [-π/4, π/4] then golden-section refinement.
QcelsResult fit(const OverlapSeries& series, const ScaledHamiltonian& sh, const FitOptions& options = {});

/// Columns n, t, re, im, stderr_re, stderr_im.
void write_overlap_csv(std::ostream& os, const OverlapSeries& series);
/// Columns theta, objective.
void write_objective_csv(std::ostream& os, const QcelsResult& result);
/// Curve thinned to every `stride`-th grid point.
nlohmann::json to_json(const QcelsResult& result, int stride = 20);

}  // namespace qgse
