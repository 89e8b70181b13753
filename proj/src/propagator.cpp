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

#include "qgse/propagator.hpp"

#include <stdexcept>

namespace qgse {

ExactPropagator::ExactPropagator(PauliSum h) : h_(std::move(h)) {
  require_dense(h_.n_qubits(), "ExactPropagator");
  spectrum_ = diagonalize(h_);
}

Eigen::VectorXcd ExactPropagator::apply(const Eigen::VectorXcd& v, double t) const {
  Eigen::VectorXcd c = spectrum_.vectors.adjoint() * v;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    c(k) *= std::polar(1.0, -t * spectrum_.values(k));
  }
  return spectrum_.vectors * c;
}

StateVector ExactPropagator::evolve(const StateVector& state, double t) const {
  if (state.n_qubits() != n_qubits()) throw std::invalid_argument("evolve: width mismatch");
  const auto amps = state.amplitudes();
  Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = amps[static_cast<std::size_t>(i)];
  const Eigen::VectorXcd w = apply(v, t);
  return StateVector::from_amplitudes(std::vector<cplx>(w.data(), w.data() + w.size()));
}

Eigen::MatrixXcd ExactPropagator::unitary(double t) const {
  Eigen::VectorXcd phases(spectrum_.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, -t * spectrum_.values(k));
  }
  return spectrum_.vectors * phases.asDiagonal() * spectrum_.vectors.adjoint();
}

StateVector evolve_exact(const StateVector& state, const PauliSum& h, double t) {
  return ExactPropagator(h).evolve(state, t);
}

}  // namespace qgse
