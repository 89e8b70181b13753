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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgse/circuit.hpp"
#include "qgse/pauli.hpp"
#include "qgse/simulator.hpp"
#include "qgse/state.hpp"

namespace qgse {

inline constexpr int kMoments = 4;
using MomentArray = std::array<double, kMoments>;

/// Thrown when a power of H exceeds the term cap; `moment` is 1-based.
class TermCapExceeded : public std::runtime_error {
 public:
  TermCapExceeded(int moment, std::size_t terms, std::size_t cap);
  int moment() const { return moment_; }

 private:
  int moment_;
};

struct MomentOperators {
  std::array<PauliSum, kMoments> powers;  // H^1..H^4
  std::array<std::size_t, kMoments> term_counts{};
  double threshold = 0.0;
  MomentArray dropped_weights{};
};

/// Powers by repeated multiplication; truncation is applied to every power
/// after all four are built.
MomentOperators build_moments(const PauliSum& h, double threshold = 0.0,
                              std::size_t term_cap = 500000);

struct FilterReport {
  std::array<std::size_t, kMoments> kept{};
  std::array<std::size_t, kMoments> dropped{};
  /// Distinct strings removed from the workload, with their ideal values.
  std::vector<std::pair<PauliString, double>> audit;
};

struct FilteredMoments {
  MomentOperators moments;
  FilterReport report;
};

/// Drops every string whose ideal <ψ|P|ψ> has magnitude <= tol.
FilteredMoments pauli_filter(const MomentOperators& m, const StateVector& psi, double tol = 1e-12);

struct MeasuredTerm {
  PauliString pauli;
  std::uint64_t z_mask = 0;
  int sign = 1;  // C P C^dagger = sign * Z_mask
  MomentArray coeff{};  // real coefficient in each power
};

struct MeasurementCircuit {
  Circuit clifford;
  std::vector<MeasuredTerm> terms;
};

struct MeasurementPlan {
  int n_qubits = 0;
  CommuteMode mode = CommuteMode::kFull;
  MomentArray constants{};  // identity coefficients, never measured
  std::vector<MeasurementCircuit> circuits;

  std::size_t term_count() const;
};

/// Clifford mapping every member of a commuting set to ±Z strings, built
/// from h, sdg, cx and cz by symplectic elimination.
MeasurementCircuit diagonalize(std::span<const PauliString> set, int n_qubits);

/// Deduplicates strings across powers, groups them and diagonalizes each set.
MeasurementPlan plan(const MomentOperators& m, CommuteMode mode = CommuteMode::kFull);

enum class EstimateMode { kExact, kShots };

enum class ShotAllocation {
  kUniform,           // spc shots on every circuit
  kVarianceWeighted,  // spc * circuits shots split by coefficient weight
};

struct EstimateOptions {
  EstimateMode mode = EstimateMode::kExact;
  std::size_t spc = 500;
  std::uint64_t seed = 0;
  int threads = 1;
  double depolarizing = 0.0;
  ShotAllocation allocation = ShotAllocation::kUniform;
};

struct MomentEstimates {
  MomentArray moments{};
  EstimateMode mode = EstimateMode::kExact;
  std::size_t spc = 0;
  std::uint64_t seed = 0;
  std::vector<ShotRecord> records;  // one per circuit in shots mode
};

MomentEstimates estimate(const MeasurementPlan& p, const StateVector& psi, const EstimateOptions& options);

/// <H^n> assembled from one shot record per circuit.
MomentArray moments_from_records(const MeasurementPlan& p, std::span<const ShotRecord> records);

MomentArray cumulants(const MomentArray& moments);

/// Denominator of the fourth-order correction
///   E = c1 - c2^2 / D * (sqrt(3 c3^2 - 2 c2 c4) - c3).
/// kC2Cubed: D = c2^2 - c4 (written c2 c2^2 / (c2^3 - c2 c4)), the default.
/// kConnectedMoments: D = c3^2 - c2 c4, the connected-moments expansion,
/// exact whenever psi lies in a two-dimensional invariant subspace of H.
enum class Qcm4Formula { kC2Cubed, kConnectedMoments };

std::string_view formula_name(Qcm4Formula f);
Qcm4Formula qcm4_formula_from_name(std::string_view name);

/// Fourth-order cumulant energy. |c2| < guard returns c1; a discriminant
/// above -clamp is clamped to zero.
double qcm4_energy(const MomentArray& c, double guard = 1e-10, double clamp = 1e-9,
                   Qcm4Formula formula = Qcm4Formula::kC2Cubed);

struct BootstrapResult {
  double mean = 0.0;
  double std = 0.0;
  std::size_t resamples = 0;
  std::size_t failures = 0;  // resamples where the energy formula failed
  std::vector<std::size_t> indices;  // resample index of each energy
  std::vector<double> energies;      // successful resamples only
};

/// Resamples each circuit's shots with replacement.
BootstrapResult bootstrap(const MeasurementPlan& p, const MomentEstimates& est,
                          std::size_t resamples = 500, std::uint64_t seed = 0, int threads = 1,
                          Qcm4Formula formula = Qcm4Formula::kC2Cubed);

nlohmann::json moment_report(const MomentOperators& m, const MeasurementPlan& p,
                             const FilterReport* filter = nullptr);

/// Columns resample, energy.
void write_bootstrap_csv(std::ostream& os, const BootstrapResult& b);

}  // namespace qgse
