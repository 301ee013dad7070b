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

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "atomswitch/analytics.hpp"
#include "atomswitch/errors.hpp"
#include "atomswitch/lindblad.hpp"
#include "atomswitch/units.hpp"

namespace atomswitch {
namespace {

using units::from_mhz;

SystemParams random_params(std::mt19937_64& rng, double flux) {
  std::uniform_real_distribution<double> rate(1.0, 40.0);
  std::uniform_real_distribution<double> coupling(0.0, 30.0);
  std::uniform_real_distribution<double> detuning(-50.0, 50.0);
  SystemParams p;
  p.kappa_i = from_mhz(rate(rng) / 4.0);
  p.kappa_bus = from_mhz(rate(rng));
  p.kappa_drop = from_mhz(rate(rng));
  p.gamma = from_mhz(rate(rng) / 8.0);
  p.g = from_mhz(coupling(rng));
  p.delta_rl = from_mhz(detuning(rng));
  p.delta_al = from_mhz(detuning(rng));
  p.flux_in = flux;
  return p;
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

TEST(Hamiltonian, HermitianAndZeroWhenUndriven) {
  const HilbertSpace s = build_space(4);
  std::mt19937_64 rng(1);
  const OperatorMatrix h = build_hamiltonian(s, random_params(rng, 3.0));
  EXPECT_LE((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(build_hamiltonian(s, SystemParams{}).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Hamiltonian, DriveAmplitude) {
  SystemParams p;
  p.kappa_bus = 3.0;
  p.flux_in = 6.0;
  EXPECT_DOUBLE_EQ(p.drive_amplitude(), 6.0);
  p.kappa_bus = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Liouvillian, PreservesTraceAndHermiticity) {
  const HilbertSpace s = build_space(4);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    const Liouvillian l = build_liouvillian(s, random_params(rng, 5.0));
    EXPECT_LE(l.trace_row_residual(), 1e-10);
    OperatorMatrix rho = OperatorMatrix::Random(s.dim(), s.dim());
    rho = rho * rho.adjoint();
    const OperatorMatrix d = unvectorize(l.matrix() * vectorize(rho), s.dim());
    EXPECT_LE((d - d.adjoint()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(std::abs(d.trace()), 1e-9);
  }
}

TEST(Liouvillian, ApplyMatchesDenseProduct) {
  const HilbertSpace s = build_space(3);
  std::mt19937_64 rng(4);
  const Liouvillian l = build_liouvillian(s, random_params(rng, 1.0));
  const Eigen::VectorXcd x = Eigen::VectorXcd::Random(l.size());
  Eigen::VectorXcd y(l.size());
  l.apply({x.data(), static_cast<std::size_t>(x.size())},
          {y.data(), static_cast<std::size_t>(y.size())});
  EXPECT_LE((y - l.matrix() * x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SteadyState, UndrivenSystemRelaxesToVacuum) {
  const HilbertSpace s = build_space(4);
  SystemParams p = reference_params();
  p.flux_in = 0.0;
  const DensityMatrix rho = steady_state(build_liouvillian(s, p));
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(rho.matrix().cwiseAbs().sum(), 1.0, 1e-10);
}

TEST(SteadyState, IsStationaryAndValid) {
  const HilbertSpace s = build_space(4);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    const Liouvillian l = build_liouvillian(s, random_params(rng, 1.0));
    const DensityMatrix rho = steady_state(l);
    EXPECT_LE((l.matrix() * vectorize(rho.matrix())).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GE(rho.diagnostics().min_eigenvalue, kEigenvalueFloor);
  }
}

TEST(SteadyState, DegenerateClosedSystem) {
  SystemParams p;
  p.g = 1.0;
  EXPECT_THROW(steady_state(build_liouvillian(build_space(2), p)), SolverDegenerateError);
}

TEST(SteadyState, TruncationGuard) {
  SystemParams p = reference_params();
  p.g = 0.0;
  p.flux_in = 2000.0;
  EXPECT_THROW(steady_state(build_liouvillian(build_space(4), p)), TruncationError);
  try {
    steady_state(build_liouvillian(build_space(4), p));
  } catch (const TruncationError& e) {
    EXPECT_NE(std::string(e.what()).find("n_max"), std::string::npos);
  }
}

TEST(Transmissions, FluxConservationOverRandomParameters) {
  const HilbertSpace s = build_space(4);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const Transmissions t = transmissions(s, random_params(rng, 0.5));
    EXPECT_NEAR(t.t_bus + t.t_drop + t.loss, 1.0, 1e-8);
    EXPECT_GE(t.t_bus, -1e-12);
    EXPECT_GE(t.t_drop, -1e-12);
    EXPECT_GE(t.loss, -1e-12);
  }
}

TEST(Transmissions, EmptyCavityClosedForm) {
  const HilbertSpace s = build_space(4);
  SystemParams p = reference_params();
  p.g = 0.0;
  for (double d : {-30.0, -5.0, 0.0, 12.0}) {
    p.delta_rl = from_mhz(d);
    const Transmissions t = transmissions(s, p);
    const double k = p.kappa();
    const double den = k * k + p.delta_rl * p.delta_rl;
    EXPECT_NEAR(t.t_drop, 4.0 * p.kappa_bus * p.kappa_drop / den, 1e-9);
    const double re = 1.0 - 2.0 * p.kappa_bus * k / den;
    const double im = 2.0 * p.kappa_bus * p.delta_rl / den;
    EXPECT_NEAR(t.t_bus, re * re + im * im, 1e-9);
  }
}

TEST(Transmissions, OutputOperatorsGiveDetectedFlux) {
  const HilbertSpace s = build_space(4);
  SystemParams p = reference_params();
  p.flux_in = 5.0;
  const DensityMatrix rho = steady_state(build_liouvillian(s, p));
  const Transmissions t = transmissions(s, p, rho.matrix());
  for (Port port : {Port::Bus, Port::Drop}) {
    const OperatorMatrix o = output_operator(s, p, port);
    const double n = expectation(o.adjoint() * o, rho.matrix()).real();
    EXPECT_NEAR(n / p.flux_in, port == Port::Bus ? t.t_bus : t.t_drop, 1e-12);
  }
}

TEST(Transmissions, TruncationConvergenceAtWeakDrive) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const SystemParams p = random_params(rng, 0.01);
    const Transmissions a = transmissions(build_space(4), p);
    const Transmissions b = transmissions(build_space(6), p);
    EXPECT_NEAR(a.t_bus, b.t_bus, 1e-6 * std::max(b.t_bus, 1e-12));
    EXPECT_NEAR(a.t_drop, b.t_drop, 1e-6 * std::max(b.t_drop, 1e-12));
  }
}

TEST(Spectrum, GridAndErrorIndex) {
  const HilbertSpace s = build_space(4);
  const std::vector<double> det{-10.0, 0.0, 10.0};
  const Spectrum sp = spectrum(s, reference_params(), det, 2);
  ASSERT_EQ(sp.size(), 3u);
  EXPECT_NEAR(sp.t_drop[0], sp.t_drop[2], 1e-10);
  SystemParams bad = reference_params();
  bad.flux_in = 2000.0;
  bad.g = 0.0;
  try {
    spectrum(s, bad, det);
    FAIL() << "expected a truncation error";
  } catch (const TruncationError& e) {
    EXPECT_NE(std::string(e.what()).find("grid index 0"), std::string::npos);
  }
}

TEST(Propagate, MatchesMatrixExponential) {
  const HilbertSpace s = build_space(3);
  std::mt19937_64 rng(12);
  const SystemParams p = random_params(rng, 4.0);
  const Liouvillian l = build_liouvillian(s, p);
  OperatorMatrix rho0 = OperatorMatrix::Random(s.dim(), s.dim());
  rho0 = rho0 * rho0.adjoint();
  rho0 /= rho0.trace();
  for (double tau : {0.0, 0.003, 0.02, 0.1}) {
    const Eigen::MatrixXcd u = (l.matrix() * tau).exp();
    const OperatorMatrix exact = unvectorize(u * vectorize(rho0), s.dim());
    const OperatorMatrix got = propagate(l, rho0, tau);
    EXPECT_LE((got - exact).cwiseAbs().maxCoeff(), 1e-7) << "tau=" << tau;
  }
}

TEST(Propagate, ExponentialDecayOracles) {
  const HilbertSpace s = build_space(2);
  SystemParams p;
  p.kappa_i = 3.0;
  p.gamma = 1.5;
  const Liouvillian l = build_liouvillian(s, p);
  const OperatorMatrix photon = projector(s, 1, AtomLevel::Ground);
  const OperatorMatrix excited = projector(s, 0, AtomLevel::Excited);
  const std::vector<double> taus{0.0, 0.1, 0.4, 1.0};
  const auto ph = propagate_grid(l, photon, taus);
  const auto ex = propagate_grid(l, excited, taus);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    EXPECT_NEAR(expectation(number_operator(s), ph[i]).real(), std::exp(-2.0 * 3.0 * taus[i]), 1e-8);
    const OperatorMatrix sm = atom_lowering(s);
    EXPECT_NEAR(expectation(sm.adjoint() * sm, ex[i]).real(), std::exp(-2.0 * 1.5 * taus[i]), 1e-8);
  }
}

TEST(Propagate, GridMatchesIndividualCalls) {
  const HilbertSpace s = build_space(3);
  const Liouvillian l = build_liouvillian(s, reference_params());
  const OperatorMatrix rho0 = projector(s, 1, AtomLevel::Ground);
  const std::vector<double> taus{0.0, 0.01, 0.05};
  const auto grid = propagate_grid(l, rho0, taus);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    EXPECT_LE((grid[i] - propagate(l, rho0, taus[i])).cwiseAbs().maxCoeff(), 1e-9);
  }
  const std::vector<double> unsorted{0.1, 0.0};
  EXPECT_THROW(propagate_grid(l, rho0, unsorted), std::invalid_argument);
  EXPECT_THROW(propagate(l, rho0, -1.0), std::invalid_argument);
}

TEST(Correlation, CoherentLightFromEmptyCavity) {
  SystemParams p = reference_params();
  p.g = 0.0;
  p.flux_in = 17.5;
  const std::vector<double> taus{0.0, 0.02, 0.2};
  const G2Curve drop = g2_curve(build_space(6), p, Port::Drop, taus);
  for (double v : drop.values) {
    EXPECT_NEAR(v, 1.0, 1e-6);
  }
  p.kappa_bus = 2.0 * p.kappa_bus;  // away from critical coupling, brighter field
  const G2Curve bus = g2_curve(build_space(8), p, Port::Bus, taus);
  for (double v : bus.values) {
    EXPECT_NEAR(v, 1.0, 1e-6);
  }
}

TEST(Correlation, BunchingAndAntibunchingWithAtom) {
  SystemParams p = reference_params();
  const std::vector<double> taus{0.0};
  EXPECT_GT(g2_curve(build_space(4), p, Port::Drop, taus).values[0], 1.5);
  EXPECT_LT(g2_curve(build_space(4), p, Port::Bus, taus).values[0], 0.5);
}

TEST(Correlation, UndefinedWithoutLight) {
  SystemParams p = reference_params();
  p.flux_in = 0.0;
  const std::vector<double> taus{0.0};
  EXPECT_THROW(g2_curve(build_space(3), p, Port::Drop, taus), UndefinedCorrelationError);
}

}  // namespace
}  // namespace atomswitch
