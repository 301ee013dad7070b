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

// Averaging over a distribution of atom-mode couplings and the switch figures
// of merit: fidelity, photon recovery, contrast, and the negativity of the
// atom-photon state produced by one switching event.

#include <optional>
#include <span>
#include <vector>

#include "atomswitch/analytics.hpp"
#include "atomswitch/hilbert.hpp"
#include "atomswitch/lindblad.hpp"

namespace atomswitch {

// Truncated normal distribution of g sampled on a uniform grid (rad/us).
struct GDistribution {
  double g_mean = 0.0;
  double g_sigma = 0.0;
  double grid_min = 0.0;
  double grid_max = 0.0;
  int grid_points = 46;

  void validate() const;
  std::vector<double> grid() const;
};

// w_k ~ exp(-(g_k - mean)^2 / (2 sigma^2)), normalized to sum 1. Evaluated
// relative to the largest exponent, so a very narrow distribution collapses
// onto the nearest grid point instead of underflowing.
std::vector<double> gaussian_weights(const GDistribution& dist);
// Same on an arbitrary grid; sigma == 0 puts all weight on the nearest point.
std::vector<double> gaussian_weights(std::span<const double> grid, double mean, double sigma);

// One spectrum per grid coupling, all on the same detuning grid.
struct SpectraByG {
  std::vector<double> g_grid;
  std::vector<double> detuning_mhz;
  std::vector<Spectrum> spectra;
};

SpectraByG compute_spectra_by_g(const HilbertSpace& space, const SystemParams& params,
                                std::span<const double> g_grid, std::span<const double> detuning_mhz,
                                unsigned workers = 1, const SteadyStateOptions& options = {});

// Pointwise weighted average; throws std::invalid_argument on grid or
// weight-count mismatch.
Spectrum ensemble_spectrum(std::span<const Spectrum> spectra, std::span<const double> weights);

// Weighted intensity correlation normalized so that it tends to 1 at long
// delays: sum_k w_k G_k(tau) / sum_k w_k F_k^2 with F_k the mean flux.
G2Curve ensemble_g2(std::span<const Correlation> correlations, std::span<const double> weights);

double fidelity(double t_bus_coupled, double t_drop_uncoupled);

// Equal-weight average of the total throughput with and without the atom.
double recovery(double t_bus_coupled, double t_drop_coupled, double t_bus_uncoupled,
                double t_drop_uncoupled);

enum class ContrastDirection {
  Increase,  // 10 log10(t_off / t_on), bus port
  Decrease,  // 10 log10(t_on / t_off), drop port
};

double contrast_db(double t_on, double t_off, ContrastDirection direction);

// Atom qubit {coupled, uncoupled} x photon path {bus, drop, lost}; index =
// atom * 3 + path.
inline constexpr int kAtomDim = 2;
inline constexpr int kPhotonDim = 3;

// State after one photon scatters off the switch prepared in an equal
// superposition of coupled and uncoupled atom. Lost amplitude of each branch
// goes to orthogonal environment states, which are traced out.
OperatorMatrix entangled_state(const analytics::PortAmplitudes& coupled,
                               const analytics::PortAmplitudes& uncoupled);

// Partial transpose over the first factor of a dim_a x dim_b system.
OperatorMatrix partial_transpose_first(const OperatorMatrix& rho, int dim_a, int dim_b);

// ||rho^{T_A}||_1 - 1, so a two-qubit Bell state gives 1.
double negativity(const OperatorMatrix& rho, int dim_a = kAtomDim, int dim_b = kPhotonDim);

// Amplitudes with the given powers and the phases of `phase_reference`.
analytics::PortAmplitudes amplitudes_from_powers(double t_bus, double t_drop,
                                                 const analytics::PortAmplitudes& phase_reference);

struct SwitchMetrics {
  double fidelity = 0.0;
  double recovery = 0.0;
  std::optional<double> contrast_bus_db;
  std::optional<double> contrast_drop_db;
  double n0 = 0.0;
  double negativity = 0.0;
};

// On-resonance transmissions with (ensemble-averaged) and without an atom.
struct OperatingPoint {
  SystemParams params;  // g holds the mean coupling
  Transmissions coupled;
  Transmissions uncoupled;
  SwitchMetrics metrics;
};

// Evaluates the switch at delta_rl = delta_al = 0 for couplings `g_values`
// with `weights` (a single g with weight 1 for a fixed coupling).
OperatingPoint evaluate_operating_point(const HilbertSpace& space, const SystemParams& params,
                                        std::span<const double> g_values,
                                        std::span<const double> weights, double g_mean,
                                        unsigned workers = 1,
                                        const SteadyStateOptions& options = {});

}  // namespace atomswitch
