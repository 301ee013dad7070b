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

// Driven Jaynes-Cummings master equation for the atom-resonator system with
// a bus and a drop coupler.
//
// Conventions:
//  * All rates are field/dipole amplitude decay rates in rad/us; the Lindblad
//    jump operators are sqrt(2 kappa_x) a and sqrt(2 gamma) sigma_minus.
//  * Frame rotating at the laser frequency, drive amplitude
//    eta = sqrt(2 kappa_bus flux_in) (real, positive).
//  * Superoperators act on column-stacked density matrices:
//    vec(A rho B) = (B^T kron A) vec(rho).
//  * Bus output B = sqrt(flux_in) - sqrt(2 kappa_bus) a, drop output
//    sqrt(2 kappa_drop) a, both in units of sqrt(photons/us).

#include <span>
#include <vector>

#include "atomswitch/hilbert.hpp"

namespace atomswitch {

struct SystemParams {
  double kappa_i = 0.0;     // intrinsic field decay
  double kappa_bus = 0.0;   // bus-coupler field decay
  double kappa_drop = 0.0;  // drop-coupler field decay
  double gamma = 0.0;       // atomic dipole decay
  double g = 0.0;           // atom-mode coupling
  double delta_rl = 0.0;    // omega_r - omega_l
  double delta_al = 0.0;    // omega_a - omega_l
  double flux_in = 0.0;     // photons/us

  double kappa() const { return kappa_i + kappa_bus + kappa_drop; }
  double drive_amplitude() const;
  // Throws std::invalid_argument on negative or non-finite fields.
  void validate() const;
};

enum class Port { Bus, Drop };

class Liouvillian {
 public:
  Liouvillian(HilbertSpace space, Eigen::MatrixXcd generator);

  const HilbertSpace& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return generator_; }
  Eigen::Index size() const { return generator_.rows(); }

  // y = L x through the dispatched kernels.
  void apply(std::span<const cplx> x, std::span<cplx> y) const;
  // max_j |sum_i L_(ii),j|: the trace functional applied to the generator.
  double trace_row_residual() const;

 private:
  HilbertSpace space_;
  Eigen::MatrixXcd generator_;
  std::vector<cplx> row_major_;
};

Eigen::VectorXcd vectorize(const OperatorMatrix& op);
OperatorMatrix unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim);

OperatorMatrix build_hamiltonian(const HilbertSpace& space, const SystemParams& params);
Liouvillian build_liouvillian(const HilbertSpace& space, const SystemParams& params);

struct SteadyStateOptions {
  double residual_tolerance = 1e-10;
  // Maximum allowed population of the n_max Fock level.
  double truncation_tolerance = 1e-6;
};

DensityMatrix steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& options = {});

// Population of the highest retained Fock level.
double truncation_population(const HilbertSpace& space, const OperatorMatrix& rho);

struct PropagateOptions {
  double rtol = 1e-8;
  // Absolute floor; negative selects 1e-12 * max |rho0_ij|.
  double atol = -1.0;
  long max_steps = 50'000'000;
};

// exp(L tau) applied to rho0 (any operator of the right shape).
OperatorMatrix propagate(const Liouvillian& liouvillian, const OperatorMatrix& rho0, double tau,
                         const PropagateOptions& options = {});

// exp(L tau_k) rho0 for an ascending grid, integrating continuously.
std::vector<OperatorMatrix> propagate_grid(const Liouvillian& liouvillian,
                                           const OperatorMatrix& rho0, std::span<const double> taus,
                                           const PropagateOptions& options = {});

OperatorMatrix output_operator(const HilbertSpace& space, const SystemParams& params, Port port);

struct Transmissions {
  double t_bus = 0.0;
  double t_drop = 0.0;
  double loss = 0.0;
};

Transmissions transmissions(const HilbertSpace& space, const SystemParams& params,
                            const OperatorMatrix& rho_ss);
Transmissions transmissions(const HilbertSpace& space, const SystemParams& params,
                            const SteadyStateOptions& options = {});

struct Spectrum {
  std::vector<double> detuning_mhz;
  std::vector<double> t_bus;
  std::vector<double> t_drop;
  std::vector<double> loss;

  std::size_t size() const { return detuning_mhz.size(); }
};

// Scans delta_rl = delta_al over the grid (MHz); other params are kept.
Spectrum spectrum(const HilbertSpace& space, const SystemParams& params,
                  std::span<const double> detuning_mhz, unsigned workers = 1,
                  const SteadyStateOptions& options = {});

// Unnormalized intensity correlation Tr[B^dag B exp(L tau)(B rho B^dag)] and
// the mean output flux Tr[B^dag B rho] for one port.
struct Correlation {
  Port port = Port::Bus;
  std::vector<double> tau_us;
  std::vector<double> numerator;
  double mean_flux = 0.0;
};

Correlation intensity_correlation(const HilbertSpace& space, const SystemParams& params, Port port,
                                  std::span<const double> tau_us,
                                  const SteadyStateOptions& options = {},
                                  const PropagateOptions& propagate_options = {});

struct G2Curve {
  Port port = Port::Bus;
  std::vector<double> tau_us;
  std::vector<double> values;
};

inline constexpr double kMinCorrelationFlux = 1e-30;

G2Curve g2_curve(const HilbertSpace& space, const SystemParams& params, Port port,
                 std::span<const double> tau_us, const SteadyStateOptions& options = {},
                 const PropagateOptions& propagate_options = {});

}  // namespace atomswitch
