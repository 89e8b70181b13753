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

#include "qgse/circuits.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qgse/propagator.hpp"

namespace qgse {

namespace {

PauliString shift_up(const PauliString& p) {
  if (p.max_qubit() >= kMaxPauliQubits - 1) throw std::length_error("no room for an ancilla");
  return PauliString::from_bits(p.x_bits() << 1, p.z_bits() << 1);
}

int chain_length(const Gate& g) {
  switch (g.kind) {
    case GateKind::kZZPhase:
    case GateKind::kCX:
    case GateKind::kCZ:
      return 1;
    case GateKind::kPauliExp:
    case GateKind::kCPauliExp: {
      const int w = static_cast<int>(g.qubits.size());
      return w >= 2 ? 2 * (w - 1) : 0;
    }
    case GateKind::kEvolve:
    case GateKind::kCEvolve:
      throw std::invalid_argument("two-qubit cost of an evolve gate is undefined");
    default:
      return 0;
  }
}

}  // namespace

Circuit trotter_step(const PauliSum& h, double tau, const TrotterOptions& options) {
  if (!h.is_hermitian(1e-10)) throw std::invalid_argument("trotter_step: H not Hermitian");
  const CommutingSets groups = group_commuting(h, CommuteMode::kFull);
  const auto& terms = h.terms();

  std::vector<double> norms;
  for (const auto& set : groups.sets) {
    double s = 0.0;
    for (std::size_t i : set) s += std::abs(terms[i].coeff);
    norms.push_back(s);
  }
  std::vector<std::size_t> order(groups.sets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return options.order == FragmentOrder::kLargestFirst ? norms[a] > norms[b] : norms[a] < norms[b];
  });

  Circuit c(h.n_qubits() + (options.controlled ? 1 : 0));
  for (std::size_t f : order) {
    for (std::size_t i : groups.sets[f]) {
      const double angle = 2.0 * tau * terms[i].coeff.real();
      if (options.controlled) {
        c.cpauliexp(0, shift_up(terms[i].pauli), angle);
      } else {
        c.pauliexp(terms[i].pauli, angle);
      }
    }
  }
  return c;
}

int two_qubit_depth(const Circuit& c) {
  std::vector<int> depth(static_cast<std::size_t>(c.n_qubits()), 0);
  int best = 0;
  for (const auto& g : c.gates()) {
    const int len = chain_length(g);
    if (len == 0) continue;
    int start = 0;
    for (int q : g.qubits) start = std::max(start, depth[static_cast<std::size_t>(q)]);
    for (int q : g.qubits) depth[static_cast<std::size_t>(q)] = start + len;
    best = std::max(best, start + len);
  }
  return best;
}

int two_qubit_count(const Circuit& c) {
  int n = 0;
  for (const auto& g : c.gates()) n += chain_length(g);
  return n;
}

Ansatz hea_ansatz(int n_qubits, int layers) {
  if (n_qubits < 2) throw std::invalid_argument("hea_ansatz: need at least 2 qubits");
  if (layers < 1) throw std::invalid_argument("hea_ansatz: need at least 1 layer");
  Circuit c(n_qubits);
  int p = 0;
  auto rotations = [&] {
    for (int q = 0; q < n_qubits; ++q) {
      c.rx(q, ParamRef{p++});
      c.rz(q, ParamRef{p++});
      c.rx(q, ParamRef{p++});
    }
  };
  c.h(0);
  for (int l = 0; l < layers; ++l) {
    rotations();
    for (int q = 1; q < n_qubits; ++q) c.zzphase(0, q, ParamRef{p++});
  }
  rotations();
  AnsatzSpec spec{n_qubits, layers, p, layers * (n_qubits - 1)};
  return {std::move(c), spec};
}

Circuit controlled(const Circuit& u) {
  Circuit out(u.n_qubits() + 1);
  for (const auto& g : u.gates()) {
    switch (g.kind) {
      case GateKind::kRx:
        out.cpauliexp(0, PauliString::single(g.qubits[0] + 1, Axis::X), g.angle);
        break;
      case GateKind::kRz:
        out.cpauliexp(0, PauliString::single(g.qubits[0] + 1, Axis::Z), g.angle);
        break;
      case GateKind::kZZPhase:
        out.cpauliexp(0,
                      PauliString::single(g.qubits[0] + 1, Axis::Z).with(g.qubits[1] + 1, Axis::Z),
                      g.angle);
        break;
      case GateKind::kPauliExp:
        out.cpauliexp(0, shift_up(g.pauli), g.angle);
        break;
      case GateKind::kEvolve: {
        Gate cg{GateKind::kCEvolve, {0}, g.angle};
        for (int q : g.qubits) cg.qubits.push_back(q + 1);
        cg.evolution = g.evolution;
        out.add(std::move(cg));
        break;
      }
      default:
        throw std::invalid_argument("controlled: cannot control a '" +
                                    std::string(gate_name(g.kind)) + "' gate");
    }
  }
  return out;
}

Circuit exact_evolution_circuit(const PauliSum& h, double t) {
  return exact_evolution_circuit(std::make_shared<const ExactPropagator>(h), t);
}

Circuit exact_evolution_circuit(std::shared_ptr<const ExactPropagator> propagator, double t) {
  const int n = propagator->n_qubits();
  Circuit c(n);
  Gate g{GateKind::kEvolve, {}, t};
  for (int q = 0; q < n; ++q) g.qubits.push_back(q);
  g.evolution = std::move(propagator);
  c.add(std::move(g));
  return c;
}

HadamardTest hadamard_test(const StateVector& prep, const Circuit& u, OverlapPart part) {
  if (u.n_qubits() != prep.n_qubits()) throw std::invalid_argument("hadamard_test: width mismatch");
  HadamardTest ht{prep.with_ancilla(), Circuit(prep.n_qubits() + 1)};
  ht.circuit.h(0);
  ht.circuit.append(controlled(u));
  if (part == OverlapPart::kImag) ht.circuit.sdg(0);
  ht.circuit.h(0);
  return ht;
}

}  // namespace qgse
