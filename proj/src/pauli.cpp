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

#include "qgse/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "qgse/dense.hpp"

namespace qgse {

namespace {

void check_qubit(int qubit) {
  if (qubit < 0 || qubit >= kMaxPauliQubits) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) + " outside [0, 64)");
  }
}

std::vector<PauliTerm> combine(std::vector<PauliTerm> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const PauliTerm& a, const PauliTerm& b) { return a.pauli < b.pauli; });
  std::vector<PauliTerm> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().pauli == t.pauli) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const PauliTerm& t) { return std::abs(t.coeff) < kPurgeTolerance; });
  return out;
}

PauliSum from_map(int n_qubits,
                  const std::unordered_map<PauliString, cplx, PauliStringHash>& acc) {
  std::vector<PauliTerm> terms;
  terms.reserve(acc.size());
  for (const auto& [p, c] : acc) terms.push_back({p, c});
  return PauliSum(n_qubits, std::move(terms));
}

}  // namespace

char axis_char(Axis a) {
  switch (a) {
    case Axis::X:
      return 'X';
    case Axis::Y:
      return 'Y';
    case Axis::Z:
      return 'Z';
    default:
      return 'I';
  }
}

PauliString PauliString::single(int qubit, Axis axis) { return PauliString{}.with(qubit, axis); }

PauliString PauliString::parse(std::string_view text) {
  PauliString p;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    Axis axis;
    switch (text[i]) {
      case 'X':
        axis = Axis::X;
        break;
      case 'Y':
        axis = Axis::Y;
        break;
      case 'Z':
        axis = Axis::Z;
        break;
      default:
        throw std::invalid_argument("bad Pauli token in '" + std::string(text) + "'");
    }
    ++i;
    int q = -1;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), q);
    if (ec != std::errc{} || q < 0) {
      throw std::invalid_argument("bad qubit index in '" + std::string(text) + "'");
    }
    i = static_cast<std::size_t>(ptr - text.data());
    check_qubit(q);
    if (p.axis(q) != Axis::I) {
      throw std::invalid_argument("qubit " + std::to_string(q) + " repeated in '" +
                                  std::string(text) + "'");
    }
    p = p.with(q, axis);
  }
  return p;
}

Axis PauliString::axis(int qubit) const {
  check_qubit(qubit);
  const int x = static_cast<int>((x_ >> qubit) & 1U);
  const int z = static_cast<int>((z_ >> qubit) & 1U);
  if (x && z) return Axis::Y;
  if (x) return Axis::X;
  if (z) return Axis::Z;
  return Axis::I;
}

PauliString PauliString::with(int qubit, Axis axis) const {
  check_qubit(qubit);
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  PauliString p = *this;
  p.x_ &= ~bit;
  p.z_ &= ~bit;
  if (axis == Axis::X || axis == Axis::Y) p.x_ |= bit;
  if (axis == Axis::Z || axis == Axis::Y) p.z_ |= bit;
  return p;
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

int PauliString::max_qubit() const {
  const std::uint64_t s = x_ | z_;
  return s == 0 ? -1 : 63 - std::countl_zero(s);
}

std::vector<std::pair<int, Axis>> PauliString::support() const {
  std::vector<std::pair<int, Axis>> out;
  for (std::uint64_t s = x_ | z_; s != 0; s &= s - 1) {
    const int q = std::countr_zero(s);
    out.emplace_back(q, axis(q));
  }
  return out;
}

std::string PauliString::to_string() const {
  std::string out;
  for (const auto& [q, a] : support()) {
    if (!out.empty()) out += ' ';
    out += axis_char(a);
    out += std::to_string(q);
  }
  return out;
}

std::strong_ordering operator<=>(const PauliString& a, const PauliString& b) {
  const std::uint64_t diff = (a.x_ ^ b.x_) | (a.z_ ^ b.z_);
  if (diff == 0) return std::strong_ordering::equal;
  const int q = std::countr_zero(diff);
  const std::uint64_t bit = std::uint64_t{1} << q;
  const bool a_on = ((a.x_ | a.z_) & bit) != 0;
  const bool b_on = ((b.x_ | b.z_) & bit) != 0;
  if (a_on && b_on) {
    return static_cast<int>(a.axis(q)) <=> static_cast<int>(b.axis(q));
  }
  // One sequence has ended its common prefix here; the other continues.
  const std::uint64_t above = ~((bit << 1) - 1);
  if (a_on) {
    return ((b.x_ | b.z_) & above) != 0 ? std::strong_ordering::less
                                         : std::strong_ordering::greater;
  }
  return ((a.x_ | a.z_) & above) != 0 ? std::strong_ordering::greater
                                      : std::strong_ordering::less;
}

std::size_t PauliStringHash::operator()(const PauliString& p) const noexcept {
  std::uint64_t h = p.x_bits() * 0x9E3779B97F4A7C15ULL;
  h ^= p.z_bits() + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

cplx PauliProduct::phase() const {
  static constexpr cplx kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kPhases[phase_exponent & 3];
}

PauliProduct multiply(const PauliString& a, const PauliString& b) {
  const std::uint64_t ax = a.x_bits() & ~a.z_bits(), ay = a.x_bits() & a.z_bits(),
                      az = ~a.x_bits() & a.z_bits();
  const std::uint64_t bx = b.x_bits() & ~b.z_bits(), by = b.x_bits() & b.z_bits(),
                      bz = ~b.x_bits() & b.z_bits();
  // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
  const int plus = std::popcount((ax & by) | (ay & bz) | (az & bx));
  const int minus = std::popcount((ay & bx) | (az & by) | (ax & bz));
  PauliProduct out;
  out.phase_exponent = ((plus - minus) % 4 + 4) % 4;
  out.product = PauliString::from_bits(a.x_bits() ^ b.x_bits(), a.z_bits() ^ b.z_bits());
  return out;
}

bool commutes(const PauliString& a, const PauliString& b, CommuteMode mode) {
  if (mode == CommuteMode::kFull) {
    const std::uint64_t anti = (a.x_bits() & b.z_bits()) ^ (a.z_bits() & b.x_bits());
    return (std::popcount(anti) & 1) == 0;
  }
  const std::uint64_t shared = a.support_bits() & b.support_bits();
  const std::uint64_t differ = (a.x_bits() ^ b.x_bits()) | (a.z_bits() ^ b.z_bits());
  return (shared & differ) == 0;
}

PauliSum::PauliSum(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 0 || n_qubits > kMaxPauliQubits) {
    throw std::invalid_argument("register width " + std::to_string(n_qubits) +
                                " outside [0, 64]");
  }
}

PauliSum::PauliSum(int n_qubits, std::vector<PauliTerm> terms) : PauliSum(n_qubits) {
  for (const auto& t : terms) {
    if (t.pauli.max_qubit() >= n_qubits_) {
      throw std::out_of_range("term '" + t.pauli.to_string() + "' outside register of width " +
                              std::to_string(n_qubits_));
    }
  }
  terms_ = combine(std::move(terms));
}

PauliSum PauliSum::identity(int n_qubits, cplx coeff) {
  return PauliSum(n_qubits, {{PauliString{}, coeff}});
}

cplx PauliSum::coefficient(const PauliString& p) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), p,
                             [](const PauliTerm& t, const PauliString& s) { return t.pauli < s; });
  return (it != terms_.end() && it->pauli == p) ? it->coeff : cplx{0.0, 0.0};
}

std::vector<PauliString> PauliSum::strings() const {
  std::vector<PauliString> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.pauli);
  return out;
}

double PauliSum::one_norm() const {
  return std::accumulate(terms_.begin(), terms_.end(), 0.0,
                         [](double s, const PauliTerm& t) { return s + std::abs(t.coeff); });
}

bool PauliSum::is_hermitian(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const PauliTerm& t) { return std::abs(t.coeff.imag()) <= tol; });
}

PauliSum PauliSum::widened(int n_qubits) const {
  if (n_qubits < n_qubits_) throw std::invalid_argument("widened: narrower register");
  PauliSum out(n_qubits);
  out.terms_ = terms_;
  return out;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n_qubits_ != n_qubits_) throw std::invalid_argument("register-width mismatch");
  std::vector<PauliTerm> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  terms_ = combine(std::move(all));
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& other) { return *this += other * cplx{-1.0}; }

PauliSum& PauliSum::operator*=(cplx scalar) {
  for (auto& t : terms_) t.coeff *= scalar;
  std::erase_if(terms_, [](const PauliTerm& t) { return std::abs(t.coeff) < kPurgeTolerance; });
  return *this;
}

PauliSum sum_multiply(const PauliSum& a, const PauliSum& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("register-width mismatch");
  std::unordered_map<PauliString, cplx, PauliStringHash> acc;
  acc.reserve(a.size() * b.size());
  for (const auto& ta : a) {
    for (const auto& tb : b) {
      const PauliProduct p = multiply(ta.pauli, tb.pauli);
      acc[p.product] += p.phase() * ta.coeff * tb.coeff;
    }
  }
  return from_map(a.n_qubits(), acc);
}

Truncation truncate(const PauliSum& a, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("truncation threshold must be >= 0");
  std::vector<PauliTerm> kept;
  double dropped = 0.0;
  for (const auto& t : a) {
    if (std::abs(t.coeff) < threshold) {
      dropped += std::abs(t.coeff);
    } else {
      kept.push_back(t);
    }
  }
  return {PauliSum(a.n_qubits(), std::move(kept)), dropped};
}

CommutingSets group_commuting(std::span<const PauliString> strings, CommuteMode mode) {
  const std::size_t n = strings.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!commutes(strings[i], strings[j], mode)) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return adj[a].size() > adj[b].size(); });

  constexpr std::size_t kUncolored = static_cast<std::size_t>(-1);
  std::vector<std::size_t> color(n, kUncolored);
  std::vector<char> taken;
  CommutingSets out;
  out.mode = mode;
  for (std::size_t v : order) {
    taken.assign(out.sets.size() + 1, 0);
    for (std::size_t u : adj[v]) {
      if (color[u] != kUncolored) taken[color[u]] = 1;
    }
    std::size_t c = 0;
    while (taken[c]) ++c;
    if (c == out.sets.size()) out.sets.emplace_back();
    color[v] = c;
    out.sets[c].push_back(v);
  }
  for (auto& s : out.sets) std::sort(s.begin(), s.end());
  return out;
}

CommutingSets group_commuting(const PauliSum& a, CommuteMode mode) {
  const auto strings = a.strings();
  return group_commuting(std::span<const PauliString>(strings), mode);
}

double spectral_norm(const PauliSum& a, NormPolicy policy) {
  if (a.n_qubits() > kMaxDenseQubits) {
    if (policy == NormPolicy::kSpectralOrOneNorm) return a.one_norm();
    require_dense(a.n_qubits(), "spectral_norm");
  }
  if (a.empty()) return 0.0;
  const Eigen::MatrixXcd m = to_dense(a);
  if (a.is_hermitian()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace qgse
