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

// Run configuration in user units (MHz for nu = omega / 2pi, us for times).
// Conversion to the internal rad/us representation happens only in the
// accessors at the bottom of this header.
//
// File format: INI-style sections with key = value lines, e.g.
//
//   [system]
//   kappa_i_mhz = 4.8
//   kappa_bus_mhz = critical

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomswitch/ensemble.hpp"
#include "atomswitch/lindblad.hpp"
#include "atomswitch/transit.hpp"

namespace atomswitch {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  struct System {
    double kappa_i_mhz = 4.8;
    double kappa_drop_mhz = 20.0;
    std::optional<double> kappa_bus_mhz;  // empty: critical coupling incl. h
    double h_mhz = 1.7;
    double gamma_mhz = 3.0;
    double g_mhz = 15.6;
    double delta_rl_mhz = 0.0;
    double delta_al_mhz = 0.0;
    double flux_per_us = 0.01;
    int n_max = 4;
    double bus_floor = 0.0;  // reported as T_bus_measured = T_bus + floor
  } system;

  struct Ensemble {
    bool enabled = true;
    double g_mean_mhz = 15.6;
    double g_sigma_mhz = 9.0;
    double grid_min_mhz = 7.5;
    double grid_max_mhz = 30.0;
    int grid_points = 46;
  } ensemble;

  struct SpectrumScan {
    double detuning_min_mhz = -60.0;
    double detuning_max_mhz = 60.0;
    int detuning_points = 121;
    std::vector<std::string> cases{"single", "ensemble", "empty"};
  } spectrum;

  struct G2 {
    double flux_per_us = 17.5;
    double tau_max_us = 0.3;
    int tau_points = 151;
    bool ensemble = true;
    int n_max = 6;  // two-photon correlations need more Fock levels than spectra
  } g2;

  struct Sweep {
    double kappa_drop_min_mhz = 1.0;
    double kappa_drop_max_mhz = 40.0;
    int points = 40;
  } sweep;

  struct Fit {
    std::string data;  // empty: synthetic data from the truth values below
    double synthetic_noise = 0.01;
    double truth_g_mean_mhz = 15.6;
    double truth_g_sigma_mhz = 9.0;
    int restarts = 3;
  } fit;

  struct Transit {
    double g_peak_mhz = 25.0;
    std::optional<double> transit_sigma_us;  // empty: calibrate to target_fwhm_us
    double target_fwhm_us = 5.0;
    double flux_per_us = 17.5;
    // From transit::calibrate_detection: 7 bus counts per 1.2 us window at the
    // transit peak, 0.1 per window without an atom, at the default flux.
    double detection_efficiency = 0.6322;
    double bus_floor = 0.007529;
    double timebin_us = 0.2;
    double duration_us = 20.0;
    int transits = 294;
  } transit;

  struct Trigger {
    int threshold_counts = 7;
    double window_us = 1.2;
    double latency_us = 0.16;
  } trigger;

  struct Project {
    double q_improvement = 5.0;
    double g_mhz = 30.0;
    double g_sigma_mhz = 0.0;
    double kappa_drop_min_mhz = 0.5;
    double kappa_drop_max_mhz = 40.0;
    int points = 80;
  } project;

  struct Run {
    std::filesystem::path out = ".";
    std::uint64_t seed = 1;
    unsigned workers = 1;
  } run;

  // Throws ConfigError on any invariant violation.
  void validate() const;
  // Canonical INI text; parsing it back yields the same configuration.
  std::string to_ini() const;
};

RunConfig default_config();
std::vector<std::string> preset_names();
// Throws ConfigError for an unknown name.
RunConfig preset(const std::string& name);

// Overlays the keys present in `text` onto `base`. Unknown sections or keys
// and malformed values raise ConfigError.
RunConfig parse_config(const std::string& text, RunConfig base);
RunConfig load_config(const std::filesystem::path& path, RunConfig base);

HilbertSpace config_space(const RunConfig& cfg);
SystemParams config_system(const RunConfig& cfg);
GDistribution config_distribution(const RunConfig& cfg);
std::vector<double> config_detunings(const RunConfig& cfg);
transit::TransitConfig config_transit(const RunConfig& cfg);
transit::TriggerConfig config_trigger(const RunConfig& cfg);

}  // namespace atomswitch
