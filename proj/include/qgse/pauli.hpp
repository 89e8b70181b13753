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

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qgse {

using cplx = std::complex<double>;

/// Widest register a PauliString can address (one bit per qubit per axis).
inline constexpr int kMaxPauliQubits = 64;

/// Coefficients below this magnitude are dropped after arithmetic.
inline constexpr double kPurgeTolerance = 1e-14;

enum class Axis : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char axis_char(Axis a);

/// A tensor product of single-qubit Paulis, stored in symplectic form.
///
/// Qubit q carries X if only the x bit is set, Z if only the z bit is set and
/// Y if both are. Ordering is lexicographic over the support list of
/// (qubit, axis) pairs with X < Y < Z; the identity sorts first.
class PauliString {
 public:
  PauliString() = default;

  static PauliString from_bits(std::uint64_t x, std::uint64_t z) {
    PauliString p;
    p.x_ = x;
    p.z_ = z;
    return p;
  }
  static PauliString single(int qubit, Axis axis);
  static PauliString z_mask(std::uint64_t mask) { return from_bits(0, mask); }

  /// Parses "X0 Y3 Z5". Empty or blank text is the identity.
  static PauliString parse(std::string_view text);

  Axis axis(int qubit) const;
  PauliString with(int qubit, Axis axis) const;

  std::uint64_t x_bits() const { return x_; }
  std::uint64_t z_bits() const { return z_; }
  std::uint64_t support_bits() const { return x_ | z_; }
  int weight() const;
  bool is_identity() const { return (x_ | z_) == 0; }
  bool is_z_type() const { return x_ == 0; }
  /// Highest qubit acted on, or -1 for the identity.
  int max_qubit() const;

  std::vector<std::pair<int, Axis>> support() const;
  std::string to_string() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend std::strong_ordering operator<=>(const PauliString& a, const PauliString& b);

 private:
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const noexcept;
};

/// Result of a string product: value equals i^phase_exponent * product.
struct PauliProduct {
  int phase_exponent = 0;  // in {0, 1, 2, 3}
  PauliString product;

  cplx phase() const;
};

PauliProduct multiply(const PauliString& a, const PauliString& b);

enum class CommuteMode { kQubitwise, kFull };

bool commutes(const PauliString& a, const PauliString& b, CommuteMode mode = CommuteMode::kFull);

struct PauliTerm {
  PauliString pauli;
  cplx coeff;
};

/// Weighted sum of Pauli strings over a fixed register width.
///
/// Terms are kept in canonical string order with like terms combined and
/// near-zero coefficients purged.
class PauliSum {
 public:
  explicit PauliSum(int n_qubits = 0);
  PauliSum(int n_qubits, std::vector<PauliTerm> terms);

  static PauliSum identity(int n_qubits, cplx coeff = 1.0);

  int n_qubits() const { return n_qubits_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  cplx coefficient(const PauliString& p) const;
  cplx identity_coefficient() const { return coefficient(PauliString{}); }
  std::vector<PauliString> strings() const;

  double one_norm() const;
  bool is_hermitian(double tol = 1e-12) const;
  /// Same terms on a wider register.
  PauliSum widened(int n_qubits) const;

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator-=(const PauliSum& other);
  PauliSum& operator*=(cplx scalar);

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
  friend PauliSum operator*(cplx s, PauliSum a) { return a *= s; }

 private:
  int n_qubits_ = 0;
  std::vector<PauliTerm> terms_;
};

/// Operator product with like terms combined.
PauliSum sum_multiply(const PauliSum& a, const PauliSum& b);

struct Truncation {
  PauliSum kept;
  double dropped_weight = 0.0;
};

/// Drops every term with |coefficient| < threshold.
Truncation truncate(const PauliSum& a, double threshold);

/// A partition of a term list into internally commuting sets. Indices refer
/// to the input list.
struct CommutingSets {
  std::vector<std::vector<std::size_t>> sets;
  CommuteMode mode = CommuteMode::kFull;
};

/// Largest-first greedy coloring of the non-commutation graph. Equal-degree
/// vertices are taken in input order.
CommutingSets group_commuting(std::span<const PauliString> strings, CommuteMode mode);
CommutingSets group_commuting(const PauliSum& a, CommuteMode mode);

enum class NormPolicy {
  kSpectral,          // dense path only; throws past the dense cap
  kSpectralOrOneNorm  // coefficient 1-norm upper bound past the dense cap
};

/// Largest |eigenvalue| for Hermitian input, largest singular value otherwise.
double spectral_norm(const PauliSum& a, NormPolicy policy = NormPolicy::kSpectral);

}  // namespace qgse
