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
#include <span>
#include <vector>

#include "qgse/circuit.hpp"
#include "qgse/propagator.hpp"
#include "qgse/state.hpp"

namespace qgse {

void apply_gate(StateVector& state, const Gate& gate, std::span<const double> params = {});
void apply_circuit_inplace(StateVector& state, const Circuit& c,
                           std::span<const double> params = {});
StateVector apply_circuit(StateVector state, const Circuit& c,
                          std::span<const double> params = {});

/// Computational-basis outcome probabilities.
std::vector<double> probabilities(const StateVector& state);

/// Exact <Z_mask> from the outcome distribution.
double z_expectation(const StateVector& state, std::uint64_t z_mask);

struct ShotRecord {
  int n_qubits = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> bitstrings;  // bit q = outcome of qubit q

  std::size_t spc() const { return bitstrings.size(); }
};

struct SampleOptions {
  /// Global depolarizing strength: each shot is replaced by a uniformly
  /// random outcome with this probability.
  double depolarizing = 0.0;
};

/// Draws spc outcomes from |amplitude|^2; deterministic in seed.
ShotRecord sample_z(const StateVector& state, std::size_t spc, std::uint64_t seed,
                    const SampleOptions& options = {});

/// Shot mean of (-1)^{parity of the masked bits}.
double estimate_pauli_z(const ShotRecord& record, std::uint64_t z_mask);

/// "# seed=<s> spc=<n> n_qubits=<w>" then a "bitstring" header, then one row
/// per shot with qubit 0 as the leftmost character.
void write_shots_csv(std::ostream& os, const ShotRecord& record);
ShotRecord read_shots_csv(std::istream& is);

}  // namespace qgse
