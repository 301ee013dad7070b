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

// Least-squares fitting of transmission spectra: Lorentzian line shapes and
// the two-parameter (mean, spread) fit of coupling-averaged master-equation
// spectra.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "atomswitch/analytics.hpp"
#include "atomswitch/ensemble.hpp"

namespace atomswitch::fit {

struct SpectrumData {
  std::vector<double> detuning_mhz;
  std::vector<double> values;
  std::vector<double> sigma;  // empty means uniform weights

  std::size_t size() const { return detuning_mhz.size(); }
  // Throws std::invalid_argument on ragged columns, non-finite or
  // nonpositive uncertainties, or fewer than `min_points` points.
  void validate(std::size_t min_points) const;
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> parameters;
  double residual = 0.0;          // chi-square when uncertainties are given
  double initial_residual = 0.0;  // at the supplied initial guess
  int iterations = 0;
  bool converged = false;
  bool boundary_warning = false;
};

struct SimplexOptions {
  int max_iterations = 2000;
  // Converged when every vertex lies within tolerance * scale of the best
  // vertex, scale = max(|x_best|, |initial step|) per coordinate.
  double tolerance = 1e-9;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Nelder-Mead downhill simplex started from x0 with per-coordinate steps.
SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, std::vector<double> steps,
                          const SimplexOptions& options = {});

// Parameters are (center, half_width, amplitude, offset) in data units.
FitResult fit_lorentzian(const SpectrumData& data, const analytics::LorentzianShape& initial,
                         const SimplexOptions& options = {});
analytics::LorentzianShape initial_lorentzian_guess(const SpectrumData& data);
analytics::LorentzianShape to_shape(const FitResult& result);

// Sum of squared (weighted) residuals of a Lorentzian against data.
double lorentzian_residual(const SpectrumData& data, const analytics::LorentzianShape& shape);

// Joint bus + drop residual of the ensemble spectrum at (g_mean, g_sigma),
// both in rad/us, against data measured on the table's detuning grid.
double g_distribution_residual(const SpectraByG& table, const SpectrumData& bus,
                               const SpectrumData& drop, double g_mean, double g_sigma);

struct GFitOptions {
  int restarts = 3;
  double jitter = 0.15;  // relative jitter of restart guesses
  std::uint64_t seed = 1;
  SimplexOptions simplex{};
  // Overrides the peak-splitting heuristic when > 0 (rad/us).
  double initial_g_mean = 0.0;
  double initial_g_sigma = 0.0;
};

// Half the splitting between the drop-transmission maxima on either side of
// the scan midpoint (rad/us); falls back to a quarter of the scan range when
// the data shows a single central peak.
double initial_g_guess(const SpectrumData& drop);

// Parameters are (g_mean, g_sigma) in rad/us.
FitResult fit_g_distribution(const SpectrumData& bus, const SpectrumData& drop,
                             const SpectraByG& table, const GFitOptions& options = {});

// Delimited text: detuning_MHz, T_bus, T_bus_sigma, T_drop, T_drop_sigma.
// Lines starting with '#' and a non-numeric header row are skipped.
struct PortData {
  SpectrumData bus;
  SpectrumData drop;
};
PortData read_spectrum_data(std::istream& in);
void write_spectrum_data(std::ostream& out, const PortData& data);

}  // namespace atomswitch::fit
