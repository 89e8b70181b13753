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

#include <Eigen/Dense>

#include "qgse/pauli.hpp"

namespace qgse {

/// Widest register for amplitude storage.
inline constexpr int kMaxStateQubits = 20;
/// Widest register for dense matrices and eigendecompositions.
inline constexpr int kMaxDenseQubits = 14;

// Basis index b has qubit q in state |1> iff bit q of b is set.

Eigen::MatrixXcd to_dense(const PauliString& p, int n_qubits);
Eigen::MatrixXcd to_dense(const PauliSum& a);

/// Throws std::length_error when n_qubits exceeds the dense cap.
void require_dense(int n_qubits, const char* what);

struct DenseSpectrum {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // columns
};

/// Full eigendecomposition of a Hermitian PauliSum.
DenseSpectrum diagonalize(const PauliSum& h);

}  // namespace qgse
