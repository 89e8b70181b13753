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

#include <memory>

#include "qgse/circuit.hpp"
#include "qgse/pauli.hpp"
#include "qgse/state.hpp"

namespace qgse {

enum class FragmentOrder {
  kLargestFirst,   // largest-norm fragment applied to the state first
  kSmallestFirst,
};

struct TrotterOptions {
  /// Emit controlled rotations on an ancilla at qubit 0; system qubit i
  /// moves to i + 1.
  bool controlled = false;
  FragmentOrder order = FragmentOrder::kLargestFirst;
};

/// One first-order step prod_f exp(-i tau H_f) over fully commuting
/// fragments of H, each fragment realized as pauliexp gates in canonical
/// term order. Fragments are ranked by coefficient 1-norm.
Circuit trotter_step(const PauliSum& h, double tau, const TrotterOptions& options = {});

/// Length of the longest chain of two-qubit gates, by greedy layering.
/// A weight-w Pauli rotation counts as a CX ladder of 2(w-1) gates (its
/// control adds one to w). Evolve gates have no cost model and throw.
int two_qubit_depth(const Circuit& c);
int two_qubit_count(const Circuit& c);

struct AnsatzSpec {
  int n_qubits = 0;
  int layers = 0;
  int n_parameters = 0;
  int two_qubit_gates = 0;
};

struct Ansatz {
  Circuit circuit;
  AnsatzSpec spec;
};

/// Hardware-efficient recompilation ansatz on n_qubits (ancilla = qubit 0):
/// H on the ancilla, then `layers` repetitions of per-qubit Rx Rz Rx and a
/// ZZPhase cascade from the ancilla to every other qubit, closed by a final
/// Rx Rz Rx layer. Parameters are numbered in gate order.
Ansatz hea_ansatz(int n_qubits, int layers);

/// Parameter count of hea_ansatz without building it.
constexpr int hea_parameter_count(int n_qubits, int layers) {
  return layers * (4 * n_qubits - 1) + 3 * n_qubits;
}

enum class OverlapPart { kReal, kImag };

/// Ancilla-controlled copy of `u` on a register one qubit wider (control at
/// qubit 0). Only rotation gates can be controlled.
Circuit controlled(const Circuit& u);

/// exp(-i t H) as a single evolve gate.
Circuit exact_evolution_circuit(const PauliSum& h, double t);
/// Same, reusing an existing eigendecomposition.
Circuit exact_evolution_circuit(std::shared_ptr<const ExactPropagator> propagator, double t);

struct HadamardTest {
  StateVector initial;  // |0>_ancilla (x) prep
  Circuit circuit;
};

/// H(anc), controlled-U, [Sdg(anc) for the imaginary part], H(anc). The
/// ancilla <Z> of the output is Re or Im of <prep|U|prep>.
HadamardTest hadamard_test(const StateVector& prep, const Circuit& u, OverlapPart part);

}  // namespace qgse
