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

#include "qgse/dense.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace qgse {

void require_dense(int n_qubits, const char* what) {
  if (n_qubits > kMaxDenseQubits) {
    throw std::length_error(std::string(what) + ": register of " + std::to_string(n_qubits) +
                            " qubits exceeds the dense cap of " +
                            std::to_string(kMaxDenseQubits));
  }
}

namespace {

void accumulate(Eigen::MatrixXcd& m, const PauliString& p, cplx coeff) {
  const std::uint64_t x = p.x_bits(), z = p.z_bits();
  static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx base = coeff * kIPow[std::popcount(x & z) & 3];
  const auto dim = static_cast<std::uint64_t>(m.rows());
  for (std::uint64_t b = 0; b < dim; ++b) {
    const cplx v = (std::popcount(b & z) & 1) ? -base : base;
    m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) += v;
  }
}

}  // namespace

Eigen::MatrixXcd to_dense(const PauliString& p, int n_qubits) {
  require_dense(n_qubits, "to_dense");
  if (p.max_qubit() >= n_qubits) throw std::out_of_range("to_dense: string wider than register");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  accumulate(m, p, 1.0);
  return m;
}

Eigen::MatrixXcd to_dense(const PauliSum& a) {
  require_dense(a.n_qubits(), "to_dense");
  const Eigen::Index dim = Eigen::Index{1} << a.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : a) accumulate(m, t.pauli, t.coeff);
  return m;
}

DenseSpectrum diagonalize(const PauliSum& h) {
  if (!h.is_hermitian(1e-10)) throw std::invalid_argument("diagonalize: operator not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_dense(h));
  if (es.info() != Eigen::Success) throw std::runtime_error("diagonalize: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace qgse
