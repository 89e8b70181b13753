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
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgse/pauli.hpp"
#include "qgse/state.hpp"

namespace qgse {

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Spatial-orbital integrals in chemist's notation, Hartree.
class FermionIntegrals {
 public:
  FermionIntegrals() = default;
  FermionIntegrals(int norb, int nelec, int ms2);

  int norb() const { return norb_; }
  int nelec() const { return nelec_; }
  int ms2() const { return ms2_; }
  double core_energy() const { return core_; }
  void set_core_energy(double e) { core_ = e; }

  double one_body(int p, int q) const { return h1_[idx2(p, q)]; }
  double two_body(int p, int q, int r, int s) const { return h2_[idx4(p, q, r, s)]; }

  /// Writes h_pq and its transpose.
  void set_one_body(int p, int q, double v);
  /// Writes (pq|rs) and its 8-fold real-orbital images.
  void set_two_body(int p, int q, int r, int s, double v);

 private:
  std::size_t idx2(int p, int q) const {
    return static_cast<std::size_t>(p) * static_cast<std::size_t>(norb_) + static_cast<std::size_t>(q);
  }
  std::size_t idx4(int p, int q, int r, int s) const {
    return idx2(p, q) * static_cast<std::size_t>(norb_ * norb_) + idx2(r, s);
  }

  int norb_ = 0;
  int nelec_ = 0;
  int ms2_ = 0;
  double core_ = 0.0;
  std::vector<double> h1_;
  std::vector<double> h2_;
};

/// FCIDUMP: "&FCI NORB=..,NELEC=..,MS2=.., ... &END" (or "/") then
/// "value i j k l" lines with 1-based indices. All-zero indices carry the
/// core energy, k = l = 0 a one-body element. Orbital-energy lines
/// (j = k = l = 0) are ignored.
FermionIntegrals parse_fcidump(std::string_view text);
FermionIntegrals read_fcidump(const std::filesystem::path& path);

/// Qubit 2p is orbital p spin alpha, qubit 2p + 1 is orbital p spin beta.
PauliSum jordan_wigner(const FermionIntegrals& fi);

/// Total electron-number operator sum_j (I - Z_j)/2.
PauliSum number_operator(int n_spin_orbitals);

struct Determinant {
  std::uint64_t mask = 0;  // bit j = spin orbital j occupied
  double coeff = 1.0;
};

struct DeterminantList {
  int norb = 0;
  std::vector<Determinant> dets;
};

/// {"norb": 2, "dets": [{"mask": "0b0011", "coeff": 0.99}]}
DeterminantList determinants_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DeterminantList& dl);

/// Aufbau determinant: alpha orbitals 0..n_alpha-1 and beta 0..n_beta-1.
Determinant hartree_fock_determinant(int norb, int nelec, int ms2);

/// Keeps determinants with |coeff| > threshold and renormalizes.
StateVector ci_initial_state(std::span<const Determinant> dets, int n_qubits, double threshold);

enum class TaperMode {
  kFullKernel,    // every independent commuting Z2 symmetry of H
  kParticleSpin,  // alpha- and beta-electron parities only
};

struct TaperingReport {
  int original_qubits = 0;
  std::vector<PauliString> generators;
  std::vector<int> signs;             // sector eigenvalue per generator
  std::vector<int> tapered_qubits;    // pivot qubit per generator
  std::vector<Axis> pivot_axes;       // single-qubit Pauli paired with each generator
  std::vector<int> kept_qubits;       // reduced qubit i was original kept_qubits[i]
  PauliSum reduced;
};

/// Independent Z2 symmetries of h: mutually commuting Pauli strings that
/// commute with every term, as an echelon basis.
std::vector<PauliString> symmetry_generators(const PauliSum& h);

/// Tapers h in the symmetry sector of `reference` (throws if the reference
/// is not an eigenvector of some generator).
TaperingReport taper_z2(const PauliSum& h, const Determinant& reference,
                        TaperMode mode = TaperMode::kFullKernel);

/// Maps a state of the original register into the reduced register. Throws
/// if the state has weight outside the selected sector.
StateVector taper_state(const TaperingReport& report, const StateVector& state);

struct QubitProjection {
  PauliSum reduced;
  std::vector<int> kept_qubits;
};

/// <b|h|b> on the listed qubits, each pinned to computational value b_q;
/// the pinned qubits are removed and the rest relabeled in order. Used to
/// drop an unoccupied spin sector.
QubitProjection project_qubits(const PauliSum& h, std::span<const std::pair<int, int>> pinned);

/// Reduced basis index of `mask` after keeping only `kept_qubits`.
std::uint64_t compress_mask(std::uint64_t mask, std::span<const int> kept_qubits);

}  // namespace qgse
