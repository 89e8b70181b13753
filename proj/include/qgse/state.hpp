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

#include "qgse/pauli.hpp"

namespace qgse {

/// Dense register of 2^n amplitudes. Basis index bit q is qubit q.
class StateVector {
 public:
  /// |0...0>.
  explicit StateVector(int n_qubits = 0);

  static StateVector basis(int n_qubits, std::uint64_t index);
  /// Throws unless the amplitudes have unit norm within 1e-10 (or normalize).
  static StateVector from_amplitudes(std::vector<cplx> amplitudes, bool normalize = false);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::span<cplx> amplitudes() { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;
  /// <this|other>.
  cplx inner(const StateVector& other) const;
  double fidelity(const StateVector& other) const { return std::norm(inner(other)); }

  /// |ancilla> (x) |this>, ancilla becoming qubit 0 and every other qubit
  /// shifting up by one.
  StateVector with_ancilla(bool ancilla_one = false) const;

 private:
  int n_qubits_ = 0;
  std::vector<cplx> amps_;
};

/// P|state> as a raw amplitude vector.
std::vector<cplx> apply_pauli(std::span<const cplx> amps, const PauliString& p);

/// <state|A|state>.
cplx expectation(const StateVector& state, const PauliSum& a);
cplx expectation(const StateVector& state, const PauliString& p);

}  // namespace qgse
