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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "atomswitch/analytics.hpp"
#include "atomswitch/ensemble.hpp"
#include "atomswitch/fit.hpp"
#include "atomswitch/units.hpp"

namespace atomswitch::fit {
namespace {

using units::from_mhz;

TEST(NelderMead, MinimizesRosenbrock) {
  const Objective f = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  SimplexOptions opts;
  opts.max_iterations = 5000;
  const SimplexResult r = nelder_mead(f, {-1.2, 1.0}, {0.5, 0.5}, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(NelderMead, ReportsIterationLimit) {
  const Objective f = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  SimplexOptions opts;
  opts.max_iterations = 3;
  const SimplexResult r = nelder_mead(f, {5.0, 5.0}, {1.0, 1.0}, opts);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_THROW(nelder_mead(f, {1.0}, {1.0, 1.0}), std::invalid_argument);
}

SpectrumData lorentzian_data(const analytics::LorentzianShape& s, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, noise);
  SpectrumData d;
  for (int i = 0; i <= 80; ++i) {
    const double x = -40.0 + i;
    d.detuning_mhz.push_back(x);
    d.values.push_back(analytics::lorentzian(s, x) + (noise > 0.0 ? n(rng) : 0.0));
  }
  return d;
}

TEST(LorentzianFit, RoundTrip) {
  const analytics::LorentzianShape truth{2.5, 6.0, -0.7, 0.8};
  const SpectrumData d = lorentzian_data(truth, 0.0, 1);
  const FitResult r = fit_lorentzian(d, initial_lorentzian_guess(d));
  EXPECT_TRUE(r.converged);
  const analytics::LorentzianShape s = to_shape(r);
  EXPECT_NEAR(s.center, truth.center, 1e-4);
  EXPECT_NEAR(s.half_width, truth.half_width, 1e-4);
  EXPECT_NEAR(s.amplitude, truth.amplitude, 1e-4);
  EXPECT_NEAR(s.offset, truth.offset, 1e-4);
  EXPECT_LE(r.residual, r.initial_residual);
}

TEST(LorentzianFit, NoisyRoundTrip) {
  const analytics::LorentzianShape truth{-4.0, 9.0, 0.5, 0.1};
  const SpectrumData d = lorentzian_data(truth, 0.01, 2);
  const analytics::LorentzianShape s = to_shape(fit_lorentzian(d, initial_lorentzian_guess(d)));
  EXPECT_NEAR(s.center, truth.center, 0.5);
  EXPECT_NEAR(s.half_width, truth.half_width, 0.5);
}

class GFit : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SystemParams p;
    p.kappa_i = from_mhz(4.8);
    p.kappa_drop = from_mhz(20.0);
    p.kappa_bus = analytics::critical_kappa_bus({p.kappa_i, p.kappa_drop, from_mhz(1.7)});
    p.gamma = from_mhz(3.0);
    p.flux_in = 0.01;
    const GDistribution dist{from_mhz(15.6), from_mhz(9.0), from_mhz(7.5), from_mhz(30.0), 46};
    std::vector<double> det;
    for (int i = 0; i <= 60; ++i) {
      det.push_back(-60.0 + 2.0 * i);
    }
    table_ = new SpectraByG(compute_spectra_by_g(build_space(4), p, dist.grid(), det, 1));
  }
  static void TearDownTestSuite() {
    delete table_;
    table_ = nullptr;
  }

  static PortData synthetic(double g_mean, double g_sigma, double noise, std::uint64_t seed) {
    const auto w = gaussian_weights(table_->g_grid, g_mean, g_sigma);
    const Spectrum clean = ensemble_spectrum(table_->spectra, w);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    PortData d;
    d.bus.detuning_mhz = d.drop.detuning_mhz = table_->detuning_mhz;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      d.bus.values.push_back(clean.t_bus[i] + noise * n(rng));
      d.drop.values.push_back(clean.t_drop[i] + noise * n(rng));
    }
    if (noise > 0.0) {
      d.bus.sigma.assign(clean.size(), noise);
      d.drop.sigma.assign(clean.size(), noise);
    }
    return d;
  }

  static SpectraByG* table_;
};

SpectraByG* GFit::table_ = nullptr;

TEST_F(GFit, NoiselessRoundTrip) {
  const PortData d = synthetic(from_mhz(15.6), from_mhz(9.0), 0.0, 1);
  EXPECT_NEAR(g_distribution_residual(*table_, d.bus, d.drop, from_mhz(15.6), from_mhz(9.0)), 0.0,
              1e-20);
  const FitResult r = fit_g_distribution(d.bus, d.drop, *table_);
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.boundary_warning);
  EXPECT_NEAR(r.parameters[0] / from_mhz(15.6), 1.0, 1e-3);
  EXPECT_NEAR(r.parameters[1] / from_mhz(9.0), 1.0, 1e-3);
}

TEST_F(GFit, RandomTruthsRecovered) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> mean(12.0, 20.0);
  std::uniform_real_distribution<double> width(5.0, 11.0);
  std::vector<double> mean_err;
  std::vector<double> width_err;
  for (int k = 0; k < 20; ++k) {
    const double gm = from_mhz(mean(rng));
    const double gs = from_mhz(width(rng));
    const PortData d = synthetic(gm, gs, 0.01, 100 + k);
    GFitOptions opts;
    opts.seed = static_cast<std::uint64_t>(k + 1);
    const FitResult r = fit_g_distribution(d.bus, d.drop, *table_, opts);
    mean_err.push_back(std::abs(r.parameters[0] / gm - 1.0));
    width_err.push_back(std::abs(r.parameters[1] / gs - 1.0));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  EXPECT_LE(median(mean_err), 0.05);
  EXPECT_LE(median(width_err), 0.15);
}

TEST_F(GFit, InitialGuessFromSplitting) {
  const PortData d = synthetic(from_mhz(20.0), from_mhz(2.0), 0.0, 1);
  EXPECT_NEAR(initial_g_guess(d.drop) / from_mhz(20.0), 1.0, 0.2);
}

TEST_F(GFit, RejectsMismatchedGrid) {
  PortData d = synthetic(from_mhz(15.6), from_mhz(9.0), 0.0, 1);
  d.bus.detuning_mhz.back() += 1.0;
  EXPECT_THROW(fit_g_distribution(d.bus, d.drop, *table_), std::invalid_argument);
}

TEST(SpectrumIo, WriteReadRoundTrip) {
  PortData d;
  d.bus = {{-1.0, 0.0, 1.5}, {0.4, 0.45, 0.5}, {0.01, 0.01, 0.02}};
  d.drop = {{-1.0, 0.0, 1.5}, {0.1, 0.12, 0.2}, {0.01, 0.03, 0.01}};
  std::stringstream ss;
  ss << "# measured\n";
  write_spectrum_data(ss, d);
  const PortData back = read_spectrum_data(ss);
  EXPECT_EQ(back.bus.detuning_mhz, d.bus.detuning_mhz);
  EXPECT_EQ(back.bus.values, d.bus.values);
  EXPECT_EQ(back.drop.sigma, d.drop.sigma);
  std::stringstream bad("1,2,3\n");
  EXPECT_THROW(read_spectrum_data(bad), std::invalid_argument);
}

}  // namespace
}  // namespace atomswitch::fit
