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

#include <cmath>
#include <random>

#include "atomswitch/analytics.hpp"
#include "atomswitch/lindblad.hpp"
#include "atomswitch/units.hpp"

namespace atomswitch::analytics {
namespace {

using units::from_mhz;

TEST(CriticalCoupling, WithAndWithoutBackscattering) {
  EXPECT_DOUBLE_EQ(critical_kappa_bus({4.8, 20.0, 0.0}), 24.8);
  EXPECT_NEAR(critical_kappa_bus({4.8, 20.0, 1.7}), std::sqrt(24.8 * 24.8 + 1.7 * 1.7), 1e-12);
  EXPECT_THROW(critical_kappa_bus({-1.0, 2.0, 0.0}), std::invalid_argument);
}

TEST(EmptyCavity, ExtinctionAndDropTransmission) {
  for (double kd : {5.0, 20.0, 55.0}) {
    const double ki = 4.8;
    const double kb = ki + kd;
    const PortAmplitudes r = empty_cavity_response(ki, kb, kd, 0.0);
    EXPECT_EQ(r.bus_power(), 0.0);
    EXPECT_NEAR(r.drop_power(), 1.0 - 2.0 * ki / (ki + kb + kd), 1e-14);
  }
  const PortAmplitudes lossless = empty_cavity_response(0.0, 3.0, 7.0, 4.0);
  EXPECT_NEAR(lossless.bus_power() + lossless.drop_power(), 1.0, 1e-14);
}

TEST(WeakDrive, ReducesToEmptyCavityWithoutAtom) {
  const PortAmplitudes a = weak_drive_response(1.0, 5.0, 3.0, 0.5, 0.0, 2.0, -1.0);
  const PortAmplitudes b = empty_cavity_response(1.0, 5.0, 3.0, 2.0);
  EXPECT_LE(std::abs(a.bus - b.bus), 1e-15);
  EXPECT_LE(std::abs(a.drop - b.drop), 1e-15);
  EXPECT_THROW(weak_drive_response(1.0, 2.0, 3.0, 0.0, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST(WeakDrive, PassivePowerBalance) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int k = 0; k < 200; ++k) {
    const PortAmplitudes r =
        weak_drive_response(u(rng) / 5.0, u(rng), u(rng), 0.1 + u(rng) / 10.0, u(rng),
                            u(rng) - 25.0, u(rng) - 25.0);
    EXPECT_LE(r.bus_power() + r.drop_power(), 1.0 + 1e-12);
  }
}

TEST(WeakDrive, StrongCouplingSuppressesDrop) {
  const double ki = from_mhz(4.8);
  const double kd = from_mhz(20.0);
  const double kb = ki + kd;
  const double gamma = from_mhz(3.0);
  double last = 1.0;
  for (double g : {0.0, 5.0, 10.0, 20.0, 40.0}) {
    const double t = weak_drive_response(ki, kb, kd, gamma, from_mhz(g), 0.0, 0.0).drop_power();
    EXPECT_LT(t, last + 1e-15);
    last = t;
  }
  EXPECT_LT(last, 0.05);
}

TEST(WeakDrive, AgreesWithMasterEquation) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const HilbertSpace space = build_space(4);
  for (int k = 0; k < 10; ++k) {
    SystemParams p;
    p.kappa_i = from_mhz(1.0 + 5.0 * u(rng));
    p.kappa_drop = from_mhz(5.0 + 30.0 * u(rng));
    p.kappa_bus = from_mhz(5.0 + 30.0 * u(rng));
    p.gamma = from_mhz(3.0);
    p.g = from_mhz(30.0 * u(rng));
    p.delta_rl = from_mhz(100.0 * u(rng) - 50.0);
    p.delta_al = from_mhz(100.0 * u(rng) - 50.0);
    p.flux_in = 1e-4;
    const Transmissions t = transmissions(space, p);
    const PortAmplitudes r = weak_drive_response(p.kappa_i, p.kappa_bus, p.kappa_drop, p.gamma,
                                                 p.g, p.delta_rl, p.delta_al);
    EXPECT_NEAR(t.t_bus, r.bus_power(), 1e-3 * r.bus_power() + 1e-9);
    EXPECT_NEAR(t.t_drop, r.drop_power(), 1e-3 * r.drop_power() + 1e-9);
  }
}

TEST(AtomNumbers, CriticalAtomNumberAndCooperativity) {
  EXPECT_DOUBLE_EQ(critical_atom_number(10.0, 2.0, 4.0), 2.5);
  EXPECT_DOUBLE_EQ(cooperativity(10.0, 2.0, 4.0), 0.8);
  EXPECT_NEAR(critical_atom_number(10.0, 2.0, 4.0) * cooperativity(10.0, 2.0, 4.0), 2.0, 1e-15);
  EXPECT_THROW(critical_atom_number(1.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(cooperativity(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST(Lorentzian, PeakAndHalfWidth) {
  const LorentzianShape s{3.0, 2.0, 0.8, 0.1};
  EXPECT_DOUBLE_EQ(lorentzian(s, 3.0), 0.9);
  EXPECT_DOUBLE_EQ(lorentzian(s, 5.0), 0.5);
  EXPECT_DOUBLE_EQ(lorentzian(s, 1.0), 0.5);
}

}  // namespace
}  // namespace atomswitch::analytics
