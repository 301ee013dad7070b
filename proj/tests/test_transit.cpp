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
#include <numeric>

#include "atomswitch/config.hpp"
#include "atomswitch/transit.hpp"
#include "atomswitch/units.hpp"

namespace atomswitch::transit {
namespace {

struct TransitFixture {
  RunConfig cfg;
  HilbertSpace space = config_space(cfg);
  SystemParams base = config_system(cfg);
  TransitConfig transit = config_transit(cfg);
  TriggerConfig trigger = config_trigger(cfg);

  TransitFixture() { transit.transit_sigma = 2.5; }
};

TEST(Trigger, FiresOnceWhenThresholdReached) {
  const TriggerConfig t{3, 1.0, 0.16};
  const std::vector<double> events{0.1, 0.5, 0.9, 1.0, 1.05};
  const auto fired = run_trigger(events, t, 100.0);
  ASSERT_EQ(fired.size(), 1u);
  EXPECT_DOUBLE_EQ(fired[0], 0.9 + 0.16);
}

TEST(Trigger, WindowIsHalfOpen) {
  const TriggerConfig t{2, 1.0, 0.0};
  const std::vector<double> edge{0.0, 1.0};
  EXPECT_TRUE(run_trigger(edge, t, 10.0).empty());
  const std::vector<double> inside{0.0, 0.999};
  EXPECT_EQ(run_trigger(inside, t, 10.0).size(), 1u);
}

TEST(Trigger, RearmsAfterRateDrops) {
  const TriggerConfig t{2, 1.0, 0.1};
  const std::vector<double> events{0.0, 0.5, 3.0, 5.0, 5.2};
  const auto fired = run_trigger(events, t, 100.0);
  ASSERT_EQ(fired.size(), 2u);
  EXPECT_DOUBLE_EQ(fired[0], 0.6);
  EXPECT_DOUBLE_EQ(fired[1], 5.3);
}

TEST(Trigger, DropsFiresBeyondHorizonAndRejectsUnsorted) {
  const TriggerConfig t{1, 1.0, 0.5};
  const std::vector<double> events{9.8};
  EXPECT_TRUE(run_trigger(events, t, 10.0).empty());
  const std::vector<double> unsorted{1.0, 0.5};
  EXPECT_THROW(run_trigger(unsorted, t, 10.0), std::invalid_argument);
  EXPECT_THROW(run_trigger(events, TriggerConfig{0, 1.0, 0.0}, 10.0), std::invalid_argument);
}

TEST(Transit, ProfileIsGaussian) {
  TransitConfig c;
  c.g_peak = 10.0;
  c.transit_sigma = 2.0;
  EXPECT_DOUBLE_EQ(g_profile(c, c.center()), 10.0);
  EXPECT_NEAR(g_profile(c, c.center() + 2.0), 10.0 * std::exp(-0.5), 1e-12);
}

TEST(Transit, DeterministicUnderFixedSeed) {
  TransitFixture s;
  const TransitModel m = transit_model(s.space, s.base, s.transit);
  const TransitTrace a = simulate_transit(m, s.transit, s.trigger, 42);
  const TransitTrace b = simulate_transit(m, s.transit, s.trigger, 42);
  const TransitTrace c = simulate_transit(m, s.transit, s.trigger, 43);
  EXPECT_EQ(a.bus_counts, b.bus_counts);
  EXPECT_EQ(a.drop_counts, b.drop_counts);
  EXPECT_EQ(a.trigger_times_us, b.trigger_times_us);
  EXPECT_NE(a.bus_counts, c.bus_counts);
}

TEST(Transit, IndependentOfWorkerCount) {
  TransitFixture s;
  const TransitModel m1 = transit_model(s.space, s.base, s.transit, 1);
  const TransitModel m3 = transit_model(s.space, s.base, s.transit, 3);
  EXPECT_EQ(m1.t_bus, m3.t_bus);
  const auto a = simulate_transits(m1, s.transit, s.trigger, 12, 1);
  const auto b = simulate_transits(m1, s.transit, s.trigger, 12, 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].bus_counts, b[k].bus_counts);
  }
}

TEST(Transit, PoissonCountsMatchExpectation) {
  TransitFixture s;
  const TransitModel m = transit_model(s.space, s.base, s.transit);
  const auto traces = simulate_transits(m, s.transit, s.trigger, 400);
  const double scale = s.transit.flux_in * s.transit.detection_efficiency * s.transit.timebin;
  const std::size_t mid = m.t_bus.size() / 2;
  double mean = 0.0;
  double sq = 0.0;
  for (const auto& t : traces) {
    mean += t.bus_counts[mid];
    sq += static_cast<double>(t.bus_counts[mid]) * t.bus_counts[mid];
  }
  mean /= traces.size();
  const double var = sq / traces.size() - mean * mean;
  const double expected = m.t_bus[mid] * scale;
  EXPECT_NEAR(mean, expected, 4.0 * std::sqrt(expected / traces.size()));
  EXPECT_NEAR(var / expected, 1.0, 0.25);
}

TEST(Transit, ModelShowsAtomInducedBusTransmission) {
  TransitFixture s;
  const TransitModel m = transit_model(s.space, s.base, s.transit);
  const std::size_t mid = m.t_bus.size() / 2;
  EXPECT_GT(m.t_bus[mid], 0.4);
  EXPECT_LT(m.t_bus.front(), 0.02);
  EXPECT_GT(m.t_drop.front(), m.t_drop[mid]);
  EXPECT_NEAR(m.t_bus.front() - s.transit.bus_floor, 0.0, 2e-5);
}

TEST(Transit, FwhmOfSampledGaussian) {
  std::vector<double> t;
  std::vector<double> y;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(-20.0 + 0.1 * i);
    y.push_back(0.3 + 2.0 * std::exp(-0.5 * t.back() * t.back() / 4.0));
  }
  EXPECT_NEAR(fwhm(t, y), 2.0 * std::sqrt(2.0 * std::log(2.0)) * 2.0, 1e-3);
  const std::vector<double> v{0.0, 1.0, 3.0, 2.0, 0.0};
  EXPECT_DOUBLE_EQ(peak_window_sum(v, 2), 5.0);
  EXPECT_THROW(peak_window_sum(v, 6), std::invalid_argument);
}

TEST(Transit, SigmaCalibrationHitsTargetWidth) {
  TransitFixture s;
  TransitConfig fine = s.transit;
  fine.bus_floor = 0.0;
  fine.transit_sigma = calibrate_transit_sigma(s.space, s.base, fine, 5.0);
  fine.timebin = 0.02;
  const TransitModel m = transit_model(s.space, s.base, fine);
  std::vector<double> t(m.bin_center_us);
  EXPECT_NEAR(fwhm(t, m.t_bus), 5.0, 0.02);
}

TEST(Transit, DefaultDetectionSettingsMatchCalibration) {
  TransitFixture s;
  const RunConfig cfg;
  s.transit.transit_sigma = calibrate_transit_sigma(s.space, s.base, s.transit, cfg.transit.target_fwhm_us);
  const DetectionCalibration cal = calibrate_detection(s.space, s.base, s.transit, s.trigger, 0.1, 7.0);
  EXPECT_NEAR(cal.detection_efficiency, cfg.transit.detection_efficiency, 1e-3);
  EXPECT_NEAR(cal.bus_floor, cfg.transit.bus_floor, 1e-5);

  s.transit.detection_efficiency = cal.detection_efficiency;
  s.transit.bus_floor = cal.bus_floor;
  const TransitModel m = transit_model(s.space, s.base, s.transit);
  const double exposure = s.transit.flux_in * s.transit.detection_efficiency * s.transit.timebin;
  std::vector<double> counts(m.t_bus);
  for (double& c : counts) {
    c *= exposure;
  }
  EXPECT_NEAR(peak_window_sum(counts, 6), 7.0, 1e-6);
  EXPECT_NEAR(6.0 * counts.front(), 0.1, 2e-3);
}

TEST(Transit, AlignedAverageRecoversModel) {
  TransitFixture s;
  const TransitModel m = transit_model(s.space, s.base, s.transit);
  const auto traces = simulate_transits(m, s.transit, s.trigger, 200);
  const AveragedTrace avg = average_aligned(traces, s.transit);
  EXPECT_EQ(avg.transits, 200u);
  const std::size_t mid = m.t_bus.size() / 2;
  EXPECT_NEAR(avg.t_bus[mid], m.t_bus[mid], 0.1);
  EXPECT_THROW(average_aligned(std::span<const TransitTrace>{}, s.transit), std::invalid_argument);
}

TEST(Transit, ConfigValidation) {
  TransitConfig c;
  c.detection_efficiency = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = TransitConfig{};
  c.timebin = 30.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(TransitConfig{}.bins(), 100u);
}

}  // namespace
}  // namespace atomswitch::transit
