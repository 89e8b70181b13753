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

#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "qgse/circuits.hpp"
#include "qgse/propagator.hpp"
#include "qgse/simulator.hpp"
#include "test_support.hpp"

namespace qgse {
namespace {

using testing::Mat;
using testing::Vec;
using testing::expm;
using testing::oracle_matrix;

const cplx kI{0.0, 1.0};

PauliString P(const char* s) { return PauliString::parse(s); }

Mat op(const char* s, int n) { return oracle_matrix(P(s), n); }
Mat id(int n) { return Mat::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n); }
Mat proj0(int q, int n) { return 0.5 * (id(n) + oracle_matrix(PauliString::single(q, Axis::Z), n)); }
Mat proj1(int q, int n) { return 0.5 * (id(n) - oracle_matrix(PauliString::single(q, Axis::Z), n)); }

Vec run(const Circuit& c, const StateVector& s) { return testing::to_eigen(apply_circuit(s, c)); }

TEST(ApplyCircuit, HadamardOnZero) {
  Circuit c(1);
  c.h(0);
  const auto out = apply_circuit(StateVector(1), c);
  EXPECT_NEAR(out[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(out[1].real(), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(ApplyCircuit, ZZPhaseOnZeroZero) {
  Circuit c(2);
  c.zzphase(0, 1, 0.3);
  const auto out = apply_circuit(StateVector(2), c);
  EXPECT_LT(std::abs(out[0] - std::exp(-kI * 0.15)), 1e-15);
}

TEST(ApplyCircuit, EveryGateMatchesDenseOracle) {
  constexpr int n = 3;
  std::mt19937_64 rng(21);
  const StateVector s = testing::random_state(rng, n);
  const Vec v = testing::to_eigen(s);
  const double t = 0.37;
  auto check = [&](const Circuit& c, const Mat& u) { EXPECT_LT((run(c, s) - u * v).norm(), 1e-12); };

  Circuit h(n);
  h.h(1);
  check(h, (op("X1", n) + op("Z1", n)) / std::sqrt(2.0));
  Circuit s_gate(n), sdg(n);
  s_gate.s(2);
  sdg.sdg(2);
  check(s_gate, proj0(2, n) + kI * proj1(2, n));
  check(sdg, proj0(2, n) - kI * proj1(2, n));
  Circuit rx(n), rz(n), zz(n);
  rx.rx(0, t);
  rz.rz(1, t);
  zz.zzphase(2, 0, t);
  check(rx, expm(-kI * t / 2.0 * op("X0", n)));
  check(rz, expm(-kI * t / 2.0 * op("Z1", n)));
  check(zz, expm(-kI * t / 2.0 * op("Z0 Z2", n)));
  Circuit cx(n), cz(n);
  cx.cx(2, 0);
  cz.cz(0, 1);
  check(cx, proj0(2, n) + proj1(2, n) * op("X0", n));
  check(cz, proj0(0, n) + proj1(0, n) * op("Z1", n));
  Circuit pe(n), cpe(n);
  pe.pauliexp(P("X0 Y1 Z2"), t);
  cpe.cpauliexp(1, P("Y0 X2"), t);
  check(pe, expm(-kI * t / 2.0 * op("X0 Y1 Z2", n)));
  check(cpe, proj0(1, n) + proj1(1, n) * expm(-kI * t / 2.0 * op("Y0 X2", n)));
}

TEST(ApplyCircuit, EvolveGatesMatchDenseOracle) {
  std::mt19937_64 rng(22);
  const PauliSum h = testing::random_hermitian(rng, 2, 6);
  const StateVector s = testing::random_state(rng, 3);
  const Vec v = testing::to_eigen(s);
  const double t = 0.8;
  // Generator on system qubits 1, 2 of a 3-qubit register.
  const PauliSum shifted = PauliSum(3, [&] {
    std::vector<PauliTerm> terms;
    for (const auto& term : h) {
      terms.push_back({PauliString::from_bits(term.pauli.x_bits() << 1, term.pauli.z_bits() << 1), term.coeff});
    }
    return terms;
  }());
  const Mat u = expm(-kI * t * oracle_matrix(shifted));

  Circuit sys(2);
  sys.append(exact_evolution_circuit(h, t));
  const Circuit ctrl = controlled(sys);
  EXPECT_LT((run(ctrl, s) - (proj0(0, 3) + proj1(0, 3) * u) * v).norm(), 1e-10);

  Circuit wide(3);
  Gate g{GateKind::kEvolve, {1, 2}, t};
  g.evolution = std::make_shared<const ExactPropagator>(h);
  wide.add(g);
  EXPECT_LT((run(wide, s) - u * v).norm(), 1e-10);
}

TEST(ApplyCircuit, RandomCircuitsPreserveNorm) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  std::uniform_int_distribution<int> q(0, 3), kind(0, 6);
  for (int k = 0; k < 50; ++k) {
    Circuit c(4);
    for (int g = 0; g < 40; ++g) {
      const int a = q(rng);
      const int b = (a + 1 + q(rng) % 3) % 4;
      switch (kind(rng)) {
        case 0: c.h(a); break;
        case 1: c.sdg(a); break;
        case 2: c.rx(a, ang(rng)); break;
        case 3: c.rz(a, ang(rng)); break;
        case 4: c.zzphase(a, b, ang(rng)); break;
        case 5: c.cx(a, b); break;
        default: c.pauliexp(testing::random_string(rng, 4), ang(rng)); break;
      }
    }
    const auto out = apply_circuit(testing::random_state(rng, 4), c);
    EXPECT_NEAR(out.norm(), 1.0, 1e-10);
  }
}

TEST(ApplyCircuit, RangeAndWidthErrors) {
  Circuit c(2);
  EXPECT_THROW(c.h(2), std::out_of_range);
  EXPECT_THROW(c.zzphase(0, 0, 0.1), std::invalid_argument);
  c.h(1);
  EXPECT_THROW(apply_circuit(StateVector(3), c), std::invalid_argument);
}

TEST(EvolveExact, EigenstatePicksUpPhase) {
  const PauliSum h(2, {{P("Z0"), 0.7}, {P("Z0 Z1"), -0.2}});
  const auto s = StateVector::basis(2, 0b01);  // Z0 = -1, Z0Z1 = -1
  const double e = -0.7 + 0.2;
  const auto out = evolve_exact(s, h, 1.3);
  EXPECT_LT(std::abs(out[0b01] - std::exp(-kI * 1.3 * e)), 1e-12);
}

TEST(EvolveExact, GroupPropertyAndDenseOracle) {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 5; ++k) {
    const PauliSum h = testing::random_hermitian(rng, 3, 10);
    const StateVector s = testing::random_state(rng, 3);
    const ExactPropagator prop(h);
    const auto two = prop.evolve(prop.evolve(s, 0.4), 0.9);
    const auto one = prop.evolve(s, 1.3);
    EXPECT_LT((testing::to_eigen(two) - testing::to_eigen(one)).norm(), 1e-10);
    const Vec want = expm(-kI * 1.3 * oracle_matrix(h)) * testing::to_eigen(s);
    EXPECT_LT((testing::to_eigen(one) - want).norm(), 1e-10);
    EXPECT_NEAR(one.norm(), 1.0, 1e-10);
  }
  EXPECT_THROW(evolve_exact(StateVector(15), PauliSum(15, {{P("Z0"), 1.0}}), 0.1), std::length_error);
}

TEST(Expectation, Examples) {
  EXPECT_EQ(expectation(StateVector(1), P("Z0")), cplx(1.0, 0.0));
  Circuit plus(1);
  plus.h(0);
  EXPECT_NEAR(expectation(apply_circuit(StateVector(1), plus), P("X0")).real(), 1.0, 1e-15);
}

TEST(Expectation, RandomAgainstDenseQuadraticForm) {
  std::mt19937_64 rng(25);
  for (int k = 0; k < 20; ++k) {
    const PauliSum a = testing::random_complex_sum(rng, 4, 12);
    const StateVector s = testing::random_state(rng, 4);
    const Vec v = testing::to_eigen(s);
    const cplx want = v.dot(oracle_matrix(a) * v);
    EXPECT_LT(std::abs(expectation(s, a) - want), 1e-12);
    const PauliSum h = testing::random_hermitian(rng, 4, 12);
    EXPECT_LT(std::abs(expectation(s, h).imag()), 1e-10);
  }
  EXPECT_THROW(expectation(StateVector(2), PauliSum(3)), std::invalid_argument);
}

StateVector plus_zero() {
  Circuit c(2);
  c.h(0);
  return apply_circuit(StateVector(2), c);
}

TEST(SampleZ, ZeroStateGivesZeroStrings) {
  const auto rec = sample_z(StateVector(3), 50, 1);
  EXPECT_EQ(rec.spc(), 50U);
  for (auto b : rec.bitstrings) EXPECT_EQ(b, 0U);
  EXPECT_EQ(estimate_pauli_z(rec, 0b101), 1.0);
}

TEST(SampleZ, PlusStateMeanWithinThreeSigma) {
  const std::size_t spc = 100000;
  const auto rec = sample_z(plus_zero(), spc, 7);
  EXPECT_LT(std::abs(estimate_pauli_z(rec, 0b01)), 3.0 / std::sqrt(static_cast<double>(spc)));
  EXPECT_EQ(estimate_pauli_z(rec, 0b10), 1.0);
}

TEST(SampleZ, DeterministicInSeed) {
  const auto a = sample_z(plus_zero(), 1000, 42), b = sample_z(plus_zero(), 1000, 42), c = sample_z(plus_zero(), 1000, 43);
  EXPECT_EQ(a.bitstrings, b.bitstrings);
  EXPECT_NE(a.bitstrings, c.bitstrings);
  EXPECT_EQ(a.seed, 42U);
}

TEST(EstimatePauliZ, AllOnesOddMask) {
  ShotRecord rec{3, 0, std::vector<std::uint64_t>(10, 0b111)};
  EXPECT_EQ(estimate_pauli_z(rec, 0b001), -1.0);
  EXPECT_EQ(estimate_pauli_z(rec, 0b111), -1.0);
  EXPECT_EQ(estimate_pauli_z(rec, 0b011), 1.0);
  EXPECT_THROW(estimate_pauli_z(rec, 0b1000), std::invalid_argument);
}

TEST(EstimatePauliZ, UnbiasedOverSeededRuns) {
  std::mt19937_64 rng(26);
  const StateVector s = testing::random_state(rng, 3);
  const std::uint64_t mask = 0b110;
  const double exact = z_expectation(s, mask);
  EXPECT_NEAR(exact, expectation(s, PauliString::z_mask(mask)).real(), 1e-12);
  const std::size_t spc = 200, runs = 200;
  double sum = 0.0;
  for (std::size_t r = 0; r < runs; ++r) sum += estimate_pauli_z(sample_z(s, spc, 1000 + r), mask);
  const double mean = sum / runs;
  const double se = std::sqrt((1.0 - exact * exact) / static_cast<double>(spc * runs));
  EXPECT_LT(std::abs(mean - exact), 3.0 * se);
}

TEST(SampleZ, DepolarizingShrinksMeans) {
  const double p = 0.3;
  const std::size_t spc = 200000;
  const auto clean = sample_z(StateVector(1), spc, 5);
  const auto noisy = sample_z(StateVector(1), spc, 5, SampleOptions{p});
  EXPECT_EQ(estimate_pauli_z(clean, 1), 1.0);
  EXPECT_NEAR(estimate_pauli_z(noisy, 1), 1.0 - p, 4.0 / std::sqrt(static_cast<double>(spc)));
  EXPECT_THROW(sample_z(StateVector(1), 10, 5, SampleOptions{1.5}), std::invalid_argument);
}

TEST(ShotCsv, RoundTrip) {
  const auto rec = sample_z(plus_zero(), 64, 9);
  std::stringstream ss;
  write_shots_csv(ss, rec);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# seed=9 spc=64 n_qubits=2\nbitstring\n", 0), 0U);
  const auto back = read_shots_csv(ss);
  EXPECT_EQ(back.bitstrings, rec.bitstrings);
  EXPECT_EQ(back.seed, 9U);
  std::stringstream bad("# seed=1 spc=2 n_qubits=2\nbitstring\n01\n");
  EXPECT_THROW(read_shots_csv(bad), std::invalid_argument);
}

TEST(ShotCsv, QubitZeroIsLeftmost) {
  ShotRecord rec{3, 1, {0b001}};
  std::stringstream ss;
  write_shots_csv(ss, rec);
  EXPECT_NE(ss.str().find("\n100\n"), std::string::npos);
}

}  // namespace
}  // namespace qgse
