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

#include "qgse/qcels.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qgse/circuits.hpp"
#include "qgse/parallel.hpp"
#include "qgse/propagator.hpp"
#include "qgse/rng.hpp"
#include "qgse/simulator.hpp"

namespace qgse {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

}  // namespace

ScaledHamiltonian scale(const PauliSum& h, NormPolicy policy) {
  if (!h.is_hermitian(1e-10)) throw std::invalid_argument("scale: H not Hermitian");
  ScaledHamiltonian sh;
  sh.h0 = h.identity_coefficient().real();
  const PauliSum shifted = h - PauliSum::identity(h.n_qubits(), sh.h0);
  sh.h1 = (4.0 / std::numbers::pi) * spectral_norm(shifted, policy);
  if (sh.h1 < 1e-12) throw std::invalid_argument("scale: H is proportional to the identity");
  sh.scaled = shifted * cplx{1.0 / sh.h1, 0.0};
  return sh;
}

double choose_grid(const ScaledHamiltonian& sh, const StateVector& psi, int n) {
  if (n < 2) throw std::invalid_argument("choose_grid: need at least 2 points");
  const double theta = expectation(psi, sh.scaled).real();
  const double phase = std::abs(theta) < 0.01 ? kQuarterPi : std::abs(theta);
  const double total = 2.0 * (2.0 * std::numbers::pi / phase);
  return std::min(total / (n - 1), kMaxTau);
}

std::string_view mode_name(AcquireMode mode) {
  switch (mode) {
    case AcquireMode::kExact:
      return "exact";
    case AcquireMode::kShots:
      return "shots";
    case AcquireMode::kRecompiled:
      return "recompiled";
  }
  return "exact";
}

AcquireMode acquire_mode_from_name(std::string_view name) {
  if (name == "exact") return AcquireMode::kExact;
  if (name == "shots") return AcquireMode::kShots;
  if (name == "recompiled") return AcquireMode::kRecompiled;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

std::vector<StateVector> hadamard_targets(const ScaledHamiltonian& sh, const StateVector& psi,
                                          double tau, int n) {
  if (psi.n_qubits() != sh.scaled.n_qubits()) throw std::invalid_argument("hadamard_targets: width mismatch");
  const ExactPropagator prop(sh.scaled);
  const double r2 = 1.0 / std::sqrt(2.0);
  std::vector<StateVector> out;
  for (int k = 0; k < n; ++k) {
    const StateVector evolved = prop.evolve(psi, k * tau);
    std::vector<cplx> amps(std::size_t{2} * psi.dim());
    for (std::size_t i = 0; i < psi.dim(); ++i) {
      amps[i << 1] = r2 * psi[i];
      amps[(i << 1) | 1U] = r2 * evolved[i];
    }
    out.push_back(StateVector::from_amplitudes(std::move(amps), true));
  }
  return out;
}

double std_error(double value, std::size_t spc) {
  if (spc == 0) throw std::invalid_argument("std_error: spc must be >= 1");
  return std::sqrt(std::max(0.0, 1.0 - value * value) / static_cast<double>(spc));
}

OverlapSeries acquire(const ScaledHamiltonian& sh, const StateVector& psi, double tau, int n,
                      const AcquireOptions& options) {
  if (n < 1) throw std::invalid_argument("acquire: need at least one time point");
  if (psi.n_qubits() != sh.scaled.n_qubits()) throw std::invalid_argument("acquire: width mismatch");
  OverlapSeries series;
  series.tau = tau;
  series.mode = options.mode;
  series.spc = options.mode == AcquireMode::kExact ? 0 : options.spc;
  const auto count = static_cast<std::size_t>(n);
  series.z.assign(count, cplx{0.0, 0.0});
  series.stderr_re.assign(count, 0.0);
  series.stderr_im.assign(count, 0.0);

  if (options.mode == AcquireMode::kExact) {
    const ExactPropagator prop(sh.scaled);
    series.z[0] = psi.inner(psi);
    parallel_for(count - 1, options.threads, [&](std::size_t i) {
      const std::size_t k = i + 1;
      series.z[k] = psi.inner(prop.evolve(psi, static_cast<double>(k) * tau));
    });
    return series;
  }

  if (options.mode == AcquireMode::kShots && options.spc == 0) {
    throw std::invalid_argument("acquire: shots mode needs spc >= 1");
  }
  if (options.mode == AcquireMode::kRecompiled) {
    if (options.ansatz == nullptr || options.compiled == nullptr) {
      throw std::invalid_argument("acquire: recompiled mode needs an ansatz and compilation data");
    }
    if (options.compiled->steps.size() != count) {
      throw std::invalid_argument("acquire: compilation has " +
                                  std::to_string(options.compiled->steps.size()) + " steps, need " +
                                  std::to_string(n));
    }
    if (options.ansatz->n_qubits() != psi.n_qubits() + 1) {
      throw std::invalid_argument("acquire: ansatz must span the system plus one ancilla");
    }
  }

  std::shared_ptr<const ExactPropagator> prop;
  if (options.mode == AcquireMode::kShots && options.trotter_steps == 0) {
    prop = std::make_shared<const ExactPropagator>(sh.scaled);
  }
  std::vector<double> values(2 * count, 0.0);
  parallel_for(2 * count, options.threads, [&](std::size_t job) {
    const std::size_t k = job / 2;
    const auto part = job % 2 == 0 ? OverlapPart::kReal : OverlapPart::kImag;
    const double t = static_cast<double>(k) * tau;
    StateVector out(1);
    if (options.mode == AcquireMode::kShots) {
      Circuit u(psi.n_qubits());
      if (options.trotter_steps == 0) {
        u = exact_evolution_circuit(prop, t);
      } else {
        const Circuit step = trotter_step(sh.scaled, t / options.trotter_steps);
        for (int r = 0; r < options.trotter_steps; ++r) u.append(step);
      }
      const HadamardTest ht = hadamard_test(psi, u, part);
      out = apply_circuit(ht.initial, ht.circuit);
    } else {
      Circuit readout(options.ansatz->n_qubits());
      if (part == OverlapPart::kImag) readout.sdg(0);
      readout.h(0);
      out = apply_circuit(StateVector(options.ansatz->n_qubits()), *options.ansatz,
                          options.compiled->steps[k].parameters);
      apply_circuit_inplace(out, readout);
    }
    if (options.spc == 0) {
      values[job] = z_expectation(out, 1);
    } else {
      const ShotRecord rec = sample_z(out, options.spc, derive_seed(options.seed, job),
                                      SampleOptions{options.depolarizing});
      values[job] = estimate_pauli_z(rec, 1);
    }
  });
  for (std::size_t k = 0; k < count; ++k) {
    series.z[k] = {values[2 * k], values[2 * k + 1]};
    if (options.spc > 0) {
      series.stderr_re[k] = std_error(values[2 * k], options.spc);
      series.stderr_im[k] = std_error(values[2 * k + 1], options.spc);
    }
  }
  return series;
}

double qcels_objective(const OverlapSeries& series, double theta) {
  cplx s{0.0, 0.0};
  for (std::size_t k = 0; k < series.z.size(); ++k) {
    s += series.z[k] * std::polar(1.0, static_cast<double>(k) * series.tau * theta);
  }
  return std::norm(s);
}

namespace {

// df/dθ = 2 Re(conj(S) S') with S = Σ z_k e^{ikτθ}.
double objective_slope(const OverlapSeries& series, double theta) {
  cplx s{0.0, 0.0}, ds{0.0, 0.0};
  for (std::size_t k = 0; k < series.z.size(); ++k) {
    const double w = static_cast<double>(k) * series.tau;
    const cplx term = series.z[k] * std::polar(1.0, w * theta);
    s += term;
    ds += cplx{0.0, w} * term;
  }
  return 2.0 * (std::conj(s) * ds).real();
}

}  // namespace

QcelsResult fit(const OverlapSeries& series, const ScaledHamiltonian& sh, const FitOptions& options) {
  if (series.size() < 2) throw std::invalid_argument("fit: need at least 2 samples");
  if (options.grid_points < 3) throw std::invalid_argument("fit: grid needs at least 3 points");
  QcelsResult r;
  const auto g = static_cast<std::size_t>(options.grid_points);
  const double step = 2.0 * kQuarterPi / static_cast<double>(g - 1);
  r.grid_theta.resize(g);
  r.grid_objective.resize(g);
  std::size_t best = 0;
  for (std::size_t j = 0; j < g; ++j) {
    r.grid_theta[j] = j + 1 == g ? kQuarterPi : -kQuarterPi + static_cast<double>(j) * step;
    r.grid_objective[j] = qcels_objective(series, r.grid_theta[j]);
    if (r.grid_objective[j] > r.grid_objective[best]) best = j;
  }

  // Near the peak f is flat to second order, so comparing f values stalls
  // around 1e-8 in theta. Bisect on the sign of f' instead when the grid
  // neighbours bracket a maximum; golden-section search otherwise.
  double a = r.grid_theta[best > 0 ? best - 1 : 0];
  double b = r.grid_theta[std::min(best + 1, g - 1)];
  const double slope_a = objective_slope(series, a), slope_b = objective_slope(series, b);
  if (best + 1 == g && slope_b >= 0.0) {
    a = b;  // maximum on the upper window edge
  } else if (best == 0 && slope_a <= 0.0) {
    b = a;
  } else if (slope_a > 0.0 && slope_b < 0.0) {
    while (b - a > options.tolerance) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      (objective_slope(series, m) > 0.0 ? a : b) = m;
    }
  } else {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = qcels_objective(series, c), fd = qcels_objective(series, d);
    while (b - a > options.tolerance) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = qcels_objective(series, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = qcels_objective(series, d);
      }
    }
  }
  const double refined = 0.5 * (a + b);
  const double f_refined = qcels_objective(series, refined);
  if (f_refined >= r.grid_objective[best]) {
    r.theta = refined;
    r.objective = f_refined;
  } else {
    r.theta = r.grid_theta[best];
    r.objective = r.grid_objective[best];
  }
  r.energy = sh.h0 + sh.h1 * r.theta;
  return r;
}

void write_overlap_csv(std::ostream& os, const OverlapSeries& series) {
  os << "n,t,re,im,stderr_re,stderr_im\n" << std::setprecision(17);
  for (std::size_t k = 0; k < series.size(); ++k) {
    os << k << ',' << static_cast<double>(k) * series.tau << ',' << series.z[k].real() << ','
       << series.z[k].imag() << ',' << series.stderr_re[k] << ',' << series.stderr_im[k] << '\n';
  }
}

void write_objective_csv(std::ostream& os, const QcelsResult& result) {
  os << "theta,objective\n" << std::setprecision(17);
  for (std::size_t j = 0; j < result.grid_theta.size(); ++j) {
    os << result.grid_theta[j] << ',' << result.grid_objective[j] << '\n';
  }
}

nlohmann::json to_json(const QcelsResult& result, int stride) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  nlohmann::json theta = nlohmann::json::array(), f = nlohmann::json::array();
  for (std::size_t j = 0; j < result.grid_theta.size(); j += static_cast<std::size_t>(stride)) {
    theta.push_back(result.grid_theta[j]);
    f.push_back(result.grid_objective[j]);
  }
  return {{"theta", result.theta},
          {"energy", result.energy},
          {"objective", result.objective},
          {"curve", {{"theta", std::move(theta)}, {"objective", std::move(f)}}}};
}

}  // namespace qgse
