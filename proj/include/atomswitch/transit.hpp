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

#pragma once

// Monte Carlo model of single-atom transits through the resonator mode,
// photon counting in both output fibers, and the real-time trigger that
// detects the atom from the bus count rate.
//
// The coupling follows g(t) = g_peak exp(-(t - t0)^2 / (2 sigma^2)) with
// t0 = duration / 2. The transit (us) is slow compared with 1/kappa (ns), so
// each time bin uses the steady-state transmissions at g(t_bin).

#include <cstdint>
#include <span>
#include <vector>

#include "atomswitch/hilbert.hpp"
#include "atomswitch/lindblad.hpp"

namespace atomswitch::transit {

struct TransitConfig {
  double g_peak = 0.0;                // rad/us
  double transit_sigma = 2.5;         // us
  double flux_in = 17.5;              // photons/us
  double detection_efficiency = 0.6;  // 0..1
  double timebin = 0.2;               // us
  double duration = 20.0;             // us
  // Residual bus transmission added to the model (imperfect extinction,
  // background counts).
  double bus_floor = 0.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
  std::size_t bins() const;
  double center() const { return 0.5 * duration; }
};

struct TriggerConfig {
  int threshold_counts = 7;
  double window = 1.2;    // us
  double latency = 0.16;  // us

  void validate() const;
};

struct TransitTrace {
  std::vector<double> bin_center_us;
  std::vector<int> bus_counts;
  std::vector<int> drop_counts;
  std::vector<double> trigger_times_us;
};

double g_profile(const TransitConfig& cfg, double t);

// Expected per-bin transmissions along the transit (noise free).
struct TransitModel {
  std::vector<double> bin_center_us;
  std::vector<double> g;
  std::vector<double> t_bus;  // includes bus_floor
  std::vector<double> t_drop;
};

TransitModel transit_model(const HilbertSpace& space, const SystemParams& base,
                           const TransitConfig& cfg, unsigned workers = 1);

// Event-driven sliding window: at every detection the window (t - window, t]
// is checked; a trigger fires at t + latency when it holds >= threshold
// events, then re-arms once the window count falls below the threshold.
// Fire times beyond `horizon` are dropped.
std::vector<double> run_trigger(std::span<const double> event_times_us, const TriggerConfig& trigger,
                                double horizon_us);

// Draws one transit with the given seed.
TransitTrace simulate_transit(const TransitModel& model, const TransitConfig& cfg,
                              const TriggerConfig& trigger, std::uint64_t seed);
TransitTrace simulate_transit(const HilbertSpace& space, const SystemParams& base,
                              const TransitConfig& cfg, const TriggerConfig& trigger);

// `count` transits with seeds rng_seed + index.
std::vector<TransitTrace> simulate_transits(const TransitModel& model, const TransitConfig& cfg,
                                            const TriggerConfig& trigger, std::size_t count,
                                            unsigned workers = 1);

struct AveragedTrace {
  std::vector<double> time_us;  // relative to the aligned center of mass
  std::vector<double> mean_bus_counts;
  std::vector<double> mean_drop_counts;
  std::vector<double> t_bus;
  std::vector<double> t_drop;
  std::size_t transits = 0;
};

// Aligns each trace on the center of mass of its background-subtracted bus
// counts (background: mean of the outer 10% of bins at each end), then
// averages per bin and converts counts to transmissions.
AveragedTrace average_aligned(std::span<const TransitTrace> traces, const TransitConfig& cfg);

// Full width at half maximum above the mean of the outer 10% of samples,
// with linear interpolation between samples.
double fwhm(std::span<const double> time, std::span<const double> values);

// Largest sum of `values` over `window_bins` consecutive bins.
double peak_window_sum(std::span<const double> values, std::size_t window_bins);

// transit_sigma giving a bus-transmission FWHM of `target_fwhm` (us) for the
// noise-free model.
double calibrate_transit_sigma(const HilbertSpace& space, const SystemParams& base,
                               const TransitConfig& cfg, double target_fwhm_us);

struct DetectionCalibration {
  double detection_efficiency = 0.0;
  double bus_floor = 0.0;
};

// Efficiency and floor so that the expected bus counts per trigger window are
// `background` far from the atom and `peak` at the transit maximum.
DetectionCalibration calibrate_detection(const HilbertSpace& space, const SystemParams& base,
                                         const TransitConfig& cfg, const TriggerConfig& trigger,
                                         double background, double peak);

}  // namespace atomswitch::transit
