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

#include "atomswitch/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "atomswitch/errors.hpp"
#include "atomswitch/parallel.hpp"

namespace atomswitch {
namespace {

void require_unit_interval(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

cplx unit_phase(cplx z) {
  const double r = std::abs(z);
  return r > 0.0 ? z / r : cplx{1.0, 0.0};
}

}  // namespace

void GDistribution::validate() const {
  if (!(g_sigma > 0.0)) {
    throw std::invalid_argument("g_sigma must be > 0");
  }
  if (!(grid_min < grid_max)) {
    throw std::invalid_argument("g grid requires grid_min < grid_max");
  }
  if (grid_min < 0.0) {
    throw std::invalid_argument("g grid must be nonnegative");
  }
  if (grid_points < 2) {
    throw std::invalid_argument("g grid needs at least 2 points");
  }
}

std::vector<double> GDistribution::grid() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(grid_points));
  const double step = (grid_max - grid_min) / (grid_points - 1);
  for (int k = 0; k < grid_points; ++k) {
    out[static_cast<std::size_t>(k)] = grid_min + step * k;
  }
  out.back() = grid_max;
  return out;
}

std::vector<double> gaussian_weights(const GDistribution& dist) {
  dist.validate();
  const std::vector<double> g = dist.grid();
  return gaussian_weights(g, dist.g_mean, dist.g_sigma);
}

std::vector<double> gaussian_weights(std::span<const double> grid, double mean, double sigma) {
  if (grid.empty()) {
    throw std::invalid_argument("gaussian_weights: empty grid");
  }
  if (!(sigma >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("gaussian_weights: sigma must be >= 0 and mean finite");
  }
  std::vector<double> w(grid.size(), 0.0);
  if (sigma == 0.0) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
      if (std::abs(grid[k] - mean) < std::abs(grid[best] - mean)) {
        best = k;
      }
    }
    w[best] = 1.0;
    return w;
  }
  std::vector<double> expo(grid.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double z = (grid[k] - mean) / sigma;
    expo[k] = -0.5 * z * z;
    top = std::max(top, expo[k]);
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    w[k] = std::exp(expo[k] - top);
    sum += w[k];
  }
  for (double& x : w) {
    x /= sum;
  }
  return w;
}

SpectraByG compute_spectra_by_g(const HilbertSpace& space, const SystemParams& params,
                                std::span<const double> g_grid, std::span<const double> detuning_mhz,
                                unsigned workers, const SteadyStateOptions& options) {
  SpectraByG table;
  table.g_grid.assign(g_grid.begin(), g_grid.end());
  table.detuning_mhz.assign(detuning_mhz.begin(), detuning_mhz.end());
  const std::size_t ng = g_grid.size();
  const std::size_t nd = detuning_mhz.size();
  table.spectra.assign(ng, Spectrum{});
  for (Spectrum& s : table.spectra) {
    s.detuning_mhz = table.detuning_mhz;
    s.t_bus.resize(nd);
    s.t_drop.resize(nd);
    s.loss.resize(nd);
  }
  // Flatten (g, detuning) so the pool stays busy for short grids.
  parallel_for(ng * nd, workers, [&](std::size_t flat) {
    const std::size_t k = flat / nd;
    const std::size_t i = flat % nd;
    SystemParams p = params;
    p.g = table.g_grid[k];
    const double one[] = {table.detuning_mhz[i]};
    const Spectrum point = spectrum(space, p, one, 1, options);
    table.spectra[k].t_bus[i] = point.t_bus[0];
    table.spectra[k].t_drop[i] = point.t_drop[0];
    table.spectra[k].loss[i] = point.loss[0];
  });
  return table;
}

Spectrum ensemble_spectrum(std::span<const Spectrum> spectra, std::span<const double> weights) {
  if (spectra.empty()) {
    throw std::invalid_argument("ensemble_spectrum: no spectra");
  }
  if (spectra.size() != weights.size()) {
    throw std::invalid_argument("ensemble_spectrum: weight count does not match spectra");
  }
  Spectrum out;
  out.detuning_mhz = spectra.front().detuning_mhz;
  const std::size_t n = out.size();
  out.t_bus.assign(n, 0.0);
  out.t_drop.assign(n, 0.0);
  out.loss.assign(n, 0.0);
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    const Spectrum& s = spectra[k];
    if (s.detuning_mhz != out.detuning_mhz || s.t_bus.size() != n || s.t_drop.size() != n ||
        s.loss.size() != n) {
      throw std::invalid_argument("ensemble_spectrum: spectra do not share a detuning grid");
    }
    const double w = weights[k];
    if (w == 0.0) {
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      out.t_bus[i] += w * s.t_bus[i];
      out.t_drop[i] += w * s.t_drop[i];
      out.loss[i] += w * s.loss[i];
    }
  }
  return out;
}

G2Curve ensemble_g2(std::span<const Correlation> correlations, std::span<const double> weights) {
  if (correlations.empty() || correlations.size() != weights.size()) {
    throw std::invalid_argument("ensemble_g2: need one weight per correlation");
  }
  G2Curve curve;
  curve.port = correlations.front().port;
  curve.tau_us = correlations.front().tau_us;
  curve.values.assign(curve.tau_us.size(), 0.0);
  double norm = 0.0;
  for (std::size_t k = 0; k < correlations.size(); ++k) {
    const Correlation& c = correlations[k];
    if (c.tau_us != curve.tau_us || c.port != curve.port) {
      throw std::invalid_argument("ensemble_g2: correlations differ in port or delay grid");
    }
    norm += weights[k] * c.mean_flux * c.mean_flux;
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
      curve.values[i] += weights[k] * c.numerator[i];
    }
  }
  if (!(norm >= kMinCorrelationFlux)) {
    throw UndefinedCorrelationError("ensemble mean output flux vanishes; g2 is undefined");
  }
  for (double& v : curve.values) {
    v /= norm;
  }
  return curve;
}

double fidelity(double t_bus_coupled, double t_drop_uncoupled) {
  require_unit_interval(t_bus_coupled, "t_bus_coupled");
  require_unit_interval(t_drop_uncoupled, "t_drop_uncoupled");
  return 0.5 * (t_bus_coupled + t_drop_uncoupled);
}

double recovery(double t_bus_coupled, double t_drop_coupled, double t_bus_uncoupled,
                double t_drop_uncoupled) {
  require_unit_interval(t_bus_coupled, "t_bus_coupled");
  require_unit_interval(t_drop_coupled, "t_drop_coupled");
  require_unit_interval(t_bus_uncoupled, "t_bus_uncoupled");
  require_unit_interval(t_drop_uncoupled, "t_drop_uncoupled");
  return 0.5 * ((t_bus_coupled + t_drop_coupled) + (t_bus_uncoupled + t_drop_uncoupled));
}

double contrast_db(double t_on, double t_off, ContrastDirection direction) {
  if (!(t_on > 0.0) || !(t_off > 0.0)) {
    throw std::invalid_argument("contrast_db requires positive transmissions");
  }
  const double ratio = direction == ContrastDirection::Increase ? t_off / t_on : t_on / t_off;
  return 10.0 * std::log10(ratio);
}

OperatorMatrix entangled_state(const analytics::PortAmplitudes& coupled,
                               const analytics::PortAmplitudes& uncoupled) {
  const double norm_c = std::norm(coupled.bus) + std::norm(coupled.drop);
  const double norm_u = std::norm(uncoupled.bus) + std::norm(uncoupled.drop);
  if (norm_c > 1.0 + 1e-12 || norm_u > 1.0 + 1e-12) {
    throw std::invalid_argument("entangled_state: branch amplitude norm exceeds 1");
  }
  const double lost_c = std::max(0.0, 1.0 - norm_c);
  const double lost_u = std::max(0.0, 1.0 - norm_u);

  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(kAtomDim * kPhotonDim);
  psi(0) = s * coupled.bus;
  psi(1) = s * coupled.drop;
  psi(kPhotonDim + 0) = s * uncoupled.bus;
  psi(kPhotonDim + 1) = s * uncoupled.drop;

  OperatorMatrix rho = psi * psi.adjoint();
  rho(2, 2) += 0.5 * lost_c;
  rho(kPhotonDim + 2, kPhotonDim + 2) += 0.5 * lost_u;
  return rho;
}

OperatorMatrix partial_transpose_first(const OperatorMatrix& rho, int dim_a, int dim_b) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a) * dim_b;
  if (dim_a < 1 || dim_b < 1 || rho.rows() != n || rho.cols() != n) {
    throw std::invalid_argument("partial transpose: state does not match the bipartition");
  }
  OperatorMatrix out(n, n);
  for (int i = 0; i < dim_a; ++i) {
    for (int j = 0; j < dim_a; ++j) {
      out.block(static_cast<Eigen::Index>(j) * dim_b, static_cast<Eigen::Index>(i) * dim_b, dim_b,
                dim_b) = rho.block(static_cast<Eigen::Index>(i) * dim_b,
                                   static_cast<Eigen::Index>(j) * dim_b, dim_b, dim_b);
    }
  }
  return out;
}

double negativity(const OperatorMatrix& rho, int dim_a, int dim_b) {
  try {
    const DensityMatrix checked(rho);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("negativity: ") + e.what());
  }
  OperatorMatrix pt = partial_transpose_first(rho, dim_a, dim_b);
  pt = 0.5 * (pt + pt.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(pt, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum() - 1.0;
}

analytics::PortAmplitudes amplitudes_from_powers(double t_bus, double t_drop,
                                                 const analytics::PortAmplitudes& phase_reference) {
  return {std::sqrt(std::max(0.0, t_bus)) * unit_phase(phase_reference.bus),
          std::sqrt(std::max(0.0, t_drop)) * unit_phase(phase_reference.drop)};
}

OperatingPoint evaluate_operating_point(const HilbertSpace& space, const SystemParams& params,
                                        std::span<const double> g_values,
                                        std::span<const double> weights, double g_mean,
                                        unsigned workers, const SteadyStateOptions& options) {
  if (g_values.empty() || g_values.size() != weights.size()) {
    throw std::invalid_argument("operating point: need one weight per coupling");
  }
  SystemParams base = params;
  base.delta_rl = 0.0;
  base.delta_al = 0.0;

  std::vector<Transmissions> per_g(g_values.size());
  parallel_for(g_values.size(), workers, [&](std::size_t k) {
    SystemParams p = base;
    p.g = g_values[k];
    per_g[k] = weights[k] == 0.0 ? Transmissions{} : transmissions(space, p, options);
  });

  OperatingPoint op;
  op.params = base;
  op.params.g = g_mean;
  for (std::size_t k = 0; k < per_g.size(); ++k) {
    op.coupled.t_bus += weights[k] * per_g[k].t_bus;
    op.coupled.t_drop += weights[k] * per_g[k].t_drop;
    op.coupled.loss += weights[k] * per_g[k].loss;
  }
  SystemParams empty = base;
  empty.g = 0.0;
  op.uncoupled = transmissions(space, empty, options);

  auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const Transmissions& c = op.coupled;
  const Transmissions& u = op.uncoupled;
  SwitchMetrics& m = op.metrics;
  m.fidelity = fidelity(clamp01(c.t_bus), clamp01(u.t_drop));
  m.recovery = recovery(clamp01(c.t_bus), clamp01(c.t_drop), clamp01(u.t_bus), clamp01(u.t_drop));
  if (c.t_bus > 0.0 && u.t_bus > 0.0) {
    m.contrast_bus_db = contrast_db(u.t_bus, c.t_bus, ContrastDirection::Increase);
  }
  if (c.t_drop > 0.0 && u.t_drop > 0.0) {
    m.contrast_drop_db = contrast_db(u.t_drop, c.t_drop, ContrastDirection::Decrease);
  }
  m.n0 = g_mean > 0.0 ? analytics::critical_atom_number(base.kappa(), base.gamma, g_mean)
                      : std::numeric_limits<double>::infinity();

  const analytics::PortAmplitudes ref_c = analytics::weak_drive_response(
      base.kappa_i, base.kappa_bus, base.kappa_drop, base.gamma, g_mean, 0.0, 0.0);
  const analytics::PortAmplitudes ref_u =
      analytics::empty_cavity_response(base.kappa_i, base.kappa_bus, base.kappa_drop, 0.0);
  const OperatorMatrix rho =
      entangled_state(amplitudes_from_powers(clamp01(c.t_bus), clamp01(c.t_drop), ref_c),
                      amplitudes_from_powers(clamp01(u.t_bus), clamp01(u.t_drop), ref_u));
  m.negativity = std::max(0.0, negativity(rho));
  return op;
}

}  // namespace atomswitch
