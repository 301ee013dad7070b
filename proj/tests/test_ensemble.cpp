// Copyright 2026 The atomswitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <random>

#include "atomswitch/analytics.hpp"
#include "atomswitch/ensemble.hpp"
#include "atomswitch/units.hpp"

namespace atomswitch {
namespace {

using analytics::PortAmplitudes;
using units::from_mhz;

GDistribution reference_distribution() {
  return {from_mhz(15.6), from_mhz(9.0), from_mhz(7.5), from_mhz(30.0), 46};
}

SystemParams reference_params() {
  SystemParams p;
  p.kappa_i = from_mhz(4.8);
  p.kappa_drop = from_mhz(20.0);
  p.kappa_bus = analytics::critical_kappa_bus({p.kappa_i, p.kappa_drop, from_mhz(1.7)});
  p.gamma = from_mhz(3.0);
  p.g = from_mhz(15.6);
  p.flux_in = 0.01;
  return p;
}

Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = {d(rng), d(rng)};
    }
  }
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(m).householderQ();
}

Eigen::MatrixXcd random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g(i, j) = {d(rng), d(rng)};
    }
  }
  Eigen::MatrixXcd rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

TEST(GaussianWeights, NormalizedAndSymmetric) {
  const GDistribution d = reference_distribution();
  const auto w = gaussian_weights(d);
  ASSERT_EQ(w.size(), 46u);
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-14);
  const std::vector<double> grid{-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto s = gaussian_weights(grid, 0.0, 1.0);
  EXPECT_NEAR(s[0], s[4], 1e-15);
  EXPECT_NEAR(s[1] / s[2], std::exp(-0.5), 1e-14);
}

TEST(GaussianWeights, NarrowDistributionCollapsesToNearestPoint) {
  const std::vector<double> grid{1.0, 2.0, 3.0};
  const auto zero = gaussian_weights(grid, 2.2, 0.0);
  EXPECT_EQ(zero, (std::vector<double>{0.0, 1.0, 0.0}));
  const auto tiny = gaussian_weights(grid, 2.9, 1e-6);
  EXPECT_NEAR(tiny[2], 1.0, 1e-14);
  for (double v : tiny) {
    EXPECT_TRUE(std::isfinite(v));
  }
  EXPECT_THROW(gaussian_weights(grid, 2.0, -1.0), std::invalid_argument);
}

TEST(EnsembleSpectrum, CacheMatchesDirectSolves) {
  const HilbertSpace space = build_space(4);
  const SystemParams p = reference_params();
  const std::vector<double> g{from_mhz(8.0), from_mhz(16.0), from_mhz(25.0)};
  const std::vector<double> det{-30.0, -4.0, 0.0, 11.0};
  const SpectraByG table = compute_spectra_by_g(space, p, g, det, 2);
  for (std::size_t k = 0; k < g.size(); ++k) {
    SystemParams q = p;
    q.g = g[k];
    const Spectrum direct = spectrum(space, q, det);
    for (std::size_t i = 0; i < det.size(); ++i) {
      EXPECT_NEAR(table.spectra[k].t_bus[i], direct.t_bus[i], 1e-12);
      EXPECT_NEAR(table.spectra[k].t_drop[i], direct.t_drop[i], 1e-12);
    }
  }
  const std::vector<double> one_hot{0.0, 1.0, 0.0};
  const Spectrum e = ensemble_spectrum(table.spectra, one_hot);
  EXPECT_EQ(e.t_drop, table.spectra[1].t_drop);
  const std::vector<double> mix{0.2, 0.5, 0.3};
  const Spectrum m = ensemble_spectrum(table.spectra, mix);
  for (std::size_t i = 0; i < det.size(); ++i) {
    EXPECT_NEAR(m.t_bus[i] + m.t_drop[i] + m.loss[i], 1.0, 1e-8);
  }
}

TEST(EnsembleG2, NormalizedByMeanFluxSquared) {
  Correlation a{Port::Drop, {0.0, 1.0}, {2.0, 1.0}, 1.0};
  Correlation b{Port::Drop, {0.0, 1.0}, {8.0, 4.0}, 2.0};
  const std::vector<Correlation> c{a, b};
  const std::vector<double> w{0.5, 0.5};
  const G2Curve g = ensemble_g2(c, w);
  EXPECT_NEAR(g.values[0], (1.0 + 4.0) / (0.5 + 2.0), 1e-15);
  EXPECT_NEAR(g.values[1], 2.5 / 2.5, 1e-15);
}

TEST(SwitchFigures, FidelityRecoveryContrast) {
  EXPECT_DOUBLE_EQ(fidelity(0.5, 0.7), 0.6);
  EXPECT_DOUBLE_EQ(recovery(0.5, 0.1, 0.0, 0.8), 0.7);
  EXPECT_THROW(fidelity(1.2, 0.5), std::invalid_argument);
  EXPECT_THROW(recovery(0.5, -0.1, 0.2, 0.2), std::invalid_argument);
  EXPECT_NEAR(contrast_db(0.01, 0.1, ContrastDirection::Increase), 10.0, 1e-12);
  EXPECT_NEAR(contrast_db(0.1, 0.01, ContrastDirection::Decrease), 10.0, 1e-12);
  EXPECT_THROW(contrast_db(0.0, 0.1, ContrastDirection::Increase), std::invalid_argument);
}

TEST(Negativity, BellStateIsMaximal) {
  const PortAmplitudes coupled{1.0, 0.0};
  const PortAmplitudes uncoupled{0.0, 1.0};
  EXPECT_NEAR(negativity(entangled_state(coupled, uncoupled)), 1.0, 1e-12);
}

TEST(Negativity, RandomSeparableStatesVanish) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(6, 6);
    double total = 0.0;
    for (int term = 0; term < 3; ++term) {
      const double p = u(rng);
      rho += p * kron(random_density(kAtomDim, rng), random_density(kPhotonDim, rng));
      total += p;
    }
    EXPECT_LT(negativity(rho / total), 1e-8);
  }
}

TEST(Negativity, InvariantUnderLocalUnitaries) {
  std::mt19937_64 rng(32);
  const PortAmplitudes coupled{{0.6, 0.1}, {0.1, -0.2}};
  const PortAmplitudes uncoupled{{0.05, 0.0}, {0.3, 0.7}};
  const Eigen::MatrixXcd rho = entangled_state(coupled, uncoupled);
  const double n = negativity(rho);
  for (int k = 0; k < 10; ++k) {
    const Eigen::MatrixXcd u = kron(random_unitary(kAtomDim, rng), random_unitary(kPhotonDim, rng));
    EXPECT_NEAR(negativity(u * rho * u.adjoint()), n, 1e-10);
  }
}

TEST(Negativity, DecreasesWithLoss) {
  double last = 2.0;
  for (double keep : {1.0, 0.8, 0.5, 0.2, 0.0}) {
    const double a = std::sqrt(keep);
    const double n = negativity(entangled_state({a, 0.0}, {0.0, a}));
    EXPECT_LT(n, last);
    EXPECT_NEAR(n, keep, 1e-12);
    last = n;
  }
}

TEST(Negativity, PartialTransposeIsAnInvolution) {
  std::mt19937_64 rng(33);
  const Eigen::MatrixXcd rho = random_density(6, rng);
  const Eigen::MatrixXcd back = partial_transpose_first(partial_transpose_first(rho, 2, 3), 2, 3);
  EXPECT_LE((back - rho).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(partial_transpose_first(rho, 3, 3), std::invalid_argument);
}

TEST(Negativity, RejectsNonPhysicalInput) {
  EXPECT_THROW(entangled_state({1.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(6, 6);
  EXPECT_THROW(negativity(bad), std::invalid_argument);
}

TEST(OperatingPoint, MetricsAreConsistent) {
  const HilbertSpace space = build_space(4);
  SystemParams p = reference_params();
  p.kappa_bus = from_mhz(25.0);
  const GDistribution d = reference_distribution();
  const OperatingPoint op =
      evaluate_operating_point(space, p, d.grid(), gaussian_weights(d), d.g_mean, 1);
  const auto& m = op.metrics;
  EXPECT_NEAR(m.fidelity, fidelity(op.coupled.t_bus, op.uncoupled.t_drop), 1e-15);
  EXPECT_NEAR(m.recovery, recovery(op.coupled.t_bus, op.coupled.t_drop, op.uncoupled.t_bus,
                                   op.uncoupled.t_drop),
              1e-15);
  EXPECT_NEAR(m.n0, analytics::critical_atom_number(p.kappa(), p.gamma, d.g_mean), 1e-12);
  EXPECT_GT(m.negativity, 0.0);
  EXPECT_LT(m.negativity, 1.0);
  const double amp_bound = std::sqrt(op.coupled.t_bus * op.uncoupled.t_drop) +
                           std::sqrt(op.coupled.t_drop * op.uncoupled.t_bus);
  EXPECT_LE(m.negativity, amp_bound + 1e-9);
}

}  // namespace
}  // namespace atomswitch
