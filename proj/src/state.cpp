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

#include "qgse/state.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qgse/dense.hpp"

namespace qgse {

namespace {

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

void check_width(int n_qubits) {
  if (n_qubits < 0 || n_qubits > kMaxStateQubits) {
    throw std::length_error("state register of " + std::to_string(n_qubits) +
                            " qubits outside [0, " + std::to_string(kMaxStateQubits) + "]");
  }
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  check_width(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= s.dim()) throw std::out_of_range("basis index outside register");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amplitudes, bool normalize) {
  const std::size_t dim = amplitudes.size();
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw std::invalid_argument("amplitude count must be a power of two");
  }
  StateVector s(std::countr_zero(dim));
  s.amps_ = std::move(amplitudes);
  const double nrm = s.norm();
  if (normalize) {
    if (!(nrm > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
    for (auto& a : s.amps_) a /= nrm;
  } else if (std::abs(nrm - 1.0) > 1e-10) {
    throw std::invalid_argument("amplitudes not normalized (norm " + std::to_string(nrm) + ")");
  }
  return s;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

cplx StateVector::inner(const StateVector& other) const {
  if (other.n_qubits_ != n_qubits_) throw std::invalid_argument("inner: width mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
  return s;
}

StateVector StateVector::with_ancilla(bool ancilla_one) const {
  StateVector out(n_qubits_ + 1);
  out.amps_[0] = 0.0;
  const std::size_t bit = ancilla_one ? 1 : 0;
  for (std::size_t i = 0; i < amps_.size(); ++i) out.amps_[(i << 1) | bit] = amps_[i];
  return out;
}

std::vector<cplx> apply_pauli(std::span<const cplx> amps, const PauliString& p) {
  const std::uint64_t x = p.x_bits(), z = p.z_bits();
  const cplx base = kIPow[std::popcount(x & z) & 3];
  std::vector<cplx> out(amps.size());
  for (std::uint64_t b = 0; b < amps.size(); ++b) {
    const cplx ph = (std::popcount(b & z) & 1) ? -base : base;
    out[b ^ x] = ph * amps[b];
  }
  return out;
}

cplx expectation(const StateVector& state, const PauliString& p) {
  if (p.max_qubit() >= state.n_qubits()) throw std::invalid_argument("expectation: width mismatch");
  const std::uint64_t x = p.x_bits(), z = p.z_bits();
  const cplx base = kIPow[std::popcount(x & z) & 3];
  const auto amps = state.amplitudes();
  cplx s = 0.0;
  for (std::uint64_t b = 0; b < amps.size(); ++b) {
    const cplx ph = (std::popcount(b & z) & 1) ? -base : base;
    s += std::conj(amps[b ^ x]) * ph * amps[b];
  }
  return s;
}

cplx expectation(const StateVector& state, const PauliSum& a) {
  if (a.n_qubits() != state.n_qubits()) throw std::invalid_argument("expectation: width mismatch");
  cplx s = 0.0;
  for (const auto& t : a) s += t.coeff * expectation(state, t.pauli);
  return s;
}

}  // namespace qgse
