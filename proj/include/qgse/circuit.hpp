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
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgse/pauli.hpp"

namespace qgse {

class ExactPropagator;

// Rotation conventions (half angle throughout):
//   rx(t) = exp(-i t X/2), rz(t) = exp(-i t Z/2), zzphase(t) = exp(-i t ZZ/2),
//   pauliexp(P, t) = exp(-i t P/2), evolve(H, t) = exp(-i t H).
// Controlled kinds list the control first in `qubits`.
enum class GateKind {
  kH,
  kS,
  kSdg,
  kRx,
  kRz,
  kZZPhase,
  kCX,
  kCZ,
  kPauliExp,
  kCPauliExp,
  kEvolve,
  kCEvolve,
};

std::string_view gate_name(GateKind kind);
GateKind gate_kind_from_name(std::string_view name);
bool is_rotation(GateKind kind);

struct ParamRef {
  int id = 0;
  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

using Angle = std::variant<double, ParamRef>;

struct Gate {
  GateKind kind = GateKind::kH;
  std::vector<int> qubits;
  Angle angle = 0.0;
  /// Rotation axis for (c)pauliexp, in register qubit indices.
  PauliString pauli;
  /// Generator for (c)evolve; its local qubit i is register qubit
  /// qubits[i] (qubits[i + 1] when controlled).
  std::shared_ptr<const ExactPropagator> evolution;
};

double resolve(const Angle& angle, std::span<const double> params);

/// Ordered gate list over a fixed register.
class Circuit {
 public:
  explicit Circuit(int n_qubits = 0) : n_qubits_(n_qubits) {}

  int n_qubits() const { return n_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  /// Validates qubit indices and arity; returns *this for chaining.
  Circuit& add(Gate gate);
  Circuit& h(int q) { return add({GateKind::kH, {q}}); }
  Circuit& s(int q) { return add({GateKind::kS, {q}}); }
  Circuit& sdg(int q) { return add({GateKind::kSdg, {q}}); }
  Circuit& rx(int q, Angle a) { return add({GateKind::kRx, {q}, a}); }
  Circuit& rz(int q, Angle a) { return add({GateKind::kRz, {q}, a}); }
  Circuit& zzphase(int q0, int q1, Angle a) { return add({GateKind::kZZPhase, {q0, q1}, a}); }
  Circuit& cx(int control, int target) { return add({GateKind::kCX, {control, target}}); }
  Circuit& cz(int q0, int q1) { return add({GateKind::kCZ, {q0, q1}}); }
  Circuit& pauliexp(const PauliString& p, Angle a);
  Circuit& cpauliexp(int control, const PauliString& p, Angle a);
  Circuit& append(const Circuit& other);

  /// Number of symbolic parameters. Throws unless ids form 0..P-1.
  int num_parameters() const;

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
};

/// {"n_qubits": n, "gates": [{"kind": "rx", "qubits": [0], "angle": 0.1 | {"param": 3}}]}.
/// pauliexp gates add "paulis"; evolve gates add "hamiltonian" (Pauli-sum JSON).
nlohmann::json to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace qgse
