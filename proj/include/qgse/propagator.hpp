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

#include "qgse/dense.hpp"
#include "qgse/pauli.hpp"
#include "qgse/state.hpp"

namespace qgse {

/// exp(-i t H) through a cached Hermitian eigendecomposition of H.
class ExactPropagator {
 public:
  explicit ExactPropagator(PauliSum h);

  const PauliSum& hamiltonian() const { return h_; }
  int n_qubits() const { return h_.n_qubits(); }
  const Eigen::VectorXd& eigenvalues() const { return spectrum_.values; }
  const Eigen::MatrixXcd& eigenvectors() const { return spectrum_.vectors; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v, double t) const;
  StateVector evolve(const StateVector& state, double t) const;
  Eigen::MatrixXcd unitary(double t) const;

 private:
  PauliSum h_;
  DenseSpectrum spectrum_;
};

/// e^{-itH}|state> (builds a one-off propagator).
StateVector evolve_exact(const StateVector& state, const PauliSum& h, double t);

}  // namespace qgse
