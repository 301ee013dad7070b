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

#include "atomswitch/fit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "atomswitch/units.hpp"

namespace atomswitch::fit {
namespace {

double weight(const SpectrumData& data, std::size_t i) {
  return data.sigma.empty() ? 1.0 : 1.0 / (data.sigma[i] * data.sigma[i]);
}

std::vector<double> ensemble_prediction(const std::vector<double>& weights,
                                        const std::vector<Spectrum>& spectra, bool bus) {
  const std::size_t n = spectra.front().size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    if (weights[k] == 0.0) {
      continue;
    }
    const std::vector<double>& col = bus ? spectra[k].t_bus : spectra[k].t_drop;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += weights[k] * col[i];
    }
  }
  return out;
}

}  // namespace

void SpectrumData::validate(std::size_t min_points) const {
  if (values.size() != detuning_mhz.size() ||
      (!sigma.empty() && sigma.size() != detuning_mhz.size())) {
    throw std::invalid_argument("spectrum data columns have different lengths");
  }
  if (size() < min_points) {
    throw std::invalid_argument(fmt::format("spectrum data needs at least {} points, got {}",
                                            min_points, size()));
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::isfinite(detuning_mhz[i]) || !std::isfinite(values[i])) {
      throw std::invalid_argument("spectrum data contains non-finite values");
    }
    if (!sigma.empty() && !(sigma[i] > 0.0 && std::isfinite(sigma[i]))) {
      throw std::invalid_argument("spectrum uncertainties must be positive and finite");
    }
  }
}

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, std::vector<double> steps,
                          const SimplexOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0 || steps.size() != n) {
    throw std::invalid_argument("nelder_mead: need one step per coordinate");
  }
  std::vector<double> scale(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (steps[j] == 0.0) {
      throw std::invalid_argument("nelder_mead: steps must be nonzero");
    }
    scale[j] = std::abs(steps[j]);
  }

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t j = 0; j < n; ++j) {
    simplex[j + 1][j] += steps[j];
  }
  std::vector<double> fv(n + 1);
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (std::size_t i = 0; i <= n; ++i) {
    fv[i] = eval(simplex[i]);
  }

  std::vector<std::size_t> order(n + 1);
  SimplexResult result;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = std::move(simplex[order[i]]);
      f2[i] = fv[order[i]];
    }
    simplex = std::move(s2);
    fv = std::move(f2);
  };
  auto spread_ok = [&] {
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double tol = options.tolerance * std::max(std::abs(simplex[0][j]), scale[j]);
        if (std::abs(simplex[i][j] - simplex[0][j]) > tol) {
          return false;
        }
      }
    }
    return true;
  };
  auto affine = [&](const std::vector<double>& c, double t) {
    // c + t (c - worst)
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = c[j] + t * (c[j] - simplex[n][j]);
    }
    return x;
  };

  sort_simplex();
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (spread_ok()) {
      result.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        centroid[j] += simplex[i][j] / static_cast<double>(n);
      }
    }
    const std::vector<double> xr = affine(centroid, 1.0);
    const double fr = eval(xr);
    if (fr < fv[0]) {
      const std::vector<double> xe = affine(centroid, 2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      const std::vector<double> xc = affine(centroid, outside ? 0.5 : -0.5);
      const double fc = eval(xc);
      if (fc < (outside ? fr : fv[n])) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          }
          fv[i] = eval(simplex[i]);
        }
      }
    }
    sort_simplex();
  }
  if (!result.converged && spread_ok()) {
    result.converged = true;
  }
  result.x = simplex[0];
  result.value = fv[0];
  result.iterations = it;
  return result;
}

double lorentzian_residual(const SpectrumData& data, const analytics::LorentzianShape& shape) {
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = analytics::lorentzian(shape, data.detuning_mhz[i]) - data.values[i];
    sum += weight(data, i) * r * r;
  }
  return sum;
}

analytics::LorentzianShape initial_lorentzian_guess(const SpectrumData& data) {
  data.validate(1);
  const auto [lo, hi] = std::minmax_element(data.values.begin(), data.values.end());
  const double first = data.values.front();
  const double last = data.values.back();
  const double edge = 0.5 * (first + last);
  // Peak if the extremum furthest from the wings is a maximum.
  const bool peak = (*hi - edge) >= (edge - *lo);
  const auto extremum = peak ? hi : lo;
  const std::size_t i0 = static_cast<std::size_t>(extremum - data.values.begin());

  analytics::LorentzianShape s;
  s.center = data.detuning_mhz[i0];
  s.offset = edge;
  s.amplitude = *extremum - edge;
  const double half = edge + 0.5 * s.amplitude;
  double width = 0.0;
  for (std::size_t i = i0; i < data.size(); ++i) {
    if ((peak && data.values[i] <= half) || (!peak && data.values[i] >= half)) {
      width = std::abs(data.detuning_mhz[i] - s.center);
      break;
    }
  }
  const double span = data.detuning_mhz.back() - data.detuning_mhz.front();
  s.half_width = width > 0.0 ? width : std::max(std::abs(span) / 10.0, 1e-6);
  return s;
}

analytics::LorentzianShape to_shape(const FitResult& result) {
  if (result.parameters.size() != 4) {
    throw std::invalid_argument("to_shape: not a Lorentzian fit result");
  }
  return {result.parameters[0], std::abs(result.parameters[1]), result.parameters[2],
          result.parameters[3]};
}

FitResult fit_lorentzian(const SpectrumData& data, const analytics::LorentzianShape& initial,
                         const SimplexOptions& options) {
  data.validate(5);
  if (!(initial.half_width > 0.0)) {
    throw std::invalid_argument("initial Lorentzian half width must be > 0");
  }
  auto objective = [&](std::span<const double> p) {
    return lorentzian_residual(data, {p[0], std::abs(p[1]), p[2], p[3]});
  };
  const double span = std::max(std::abs(data.detuning_mhz.back() - data.detuning_mhz.front()), 1e-9);
  const auto [lo, hi] = std::minmax_element(data.values.begin(), data.values.end());
  const double range = std::max(*hi - *lo, 1e-3);
  std::vector<double> x0{initial.center, initial.half_width, initial.amplitude, initial.offset};
  std::vector<double> steps{0.05 * span, 0.25 * initial.half_width, 0.25 * range, 0.1 * range};

  FitResult result;
  result.names = {"center_mhz", "half_width_mhz", "amplitude", "offset"};
  result.initial_residual = objective(x0);
  SimplexResult best = nelder_mead(objective, x0, steps, options);
  result.iterations = best.iterations;
  // Restart from the optimum: a collapsed simplex can stall short of it.
  for (int restart = 0; restart < 2 && best.converged; ++restart) {
    std::vector<double> s2(4);
    for (std::size_t j = 0; j < 4; ++j) {
      s2[j] = 0.1 * steps[j];
    }
    SimplexResult again = nelder_mead(objective, best.x, s2, options);
    result.iterations += again.iterations;
    if (again.value < best.value) {
      best = again;
    } else {
      best.converged = best.converged && again.converged;
      break;
    }
  }
  result.parameters = best.x;
  result.parameters[1] = std::abs(result.parameters[1]);
  result.residual = best.value;
  result.converged = best.converged && best.value <= result.initial_residual;
  return result;
}

double g_distribution_residual(const SpectraByG& table, const SpectrumData& bus,
                               const SpectrumData& drop, double g_mean, double g_sigma) {
  if (table.spectra.empty() || table.spectra.size() != table.g_grid.size()) {
    throw std::invalid_argument("g fit: empty or inconsistent spectra table");
  }
  if (bus.detuning_mhz != table.detuning_mhz || drop.detuning_mhz != table.detuning_mhz) {
    throw std::invalid_argument("g fit: data detunings differ from the spectra table grid");
  }
  const std::vector<double> w = gaussian_weights(table.g_grid, g_mean, std::abs(g_sigma));
  const std::vector<double> model_bus = ensemble_prediction(w, table.spectra, true);
  const std::vector<double> model_drop = ensemble_prediction(w, table.spectra, false);
  double sum = 0.0;
  for (std::size_t i = 0; i < bus.size(); ++i) {
    const double rb = model_bus[i] - bus.values[i];
    const double rd = model_drop[i] - drop.values[i];
    sum += weight(bus, i) * rb * rb + weight(drop, i) * rd * rd;
  }
  return sum;
}

double initial_g_guess(const SpectrumData& drop) {
  drop.validate(3);
  // Largest drop transmission on either side of the scan midpoint.
  const double mid = 0.5 * (drop.detuning_mhz.front() + drop.detuning_mhz.back());
  std::size_t left = drop.size();
  std::size_t right = drop.size();
  for (std::size_t i = 0; i < drop.size(); ++i) {
    std::size_t& side = drop.detuning_mhz[i] < mid ? left : right;
    if (side == drop.size() || drop.values[i] > drop.values[side]) {
      side = i;
    }
  }
  const double span = std::abs(drop.detuning_mhz.back() - drop.detuning_mhz.front());
  const double spacing = span / static_cast<double>(drop.size() - 1);
  double splitting_mhz = 0.5 * span;
  if (left < drop.size() && right < drop.size()) {
    const double s = std::abs(drop.detuning_mhz[right] - drop.detuning_mhz[left]);
    if (s > 2.0 * spacing) {
      splitting_mhz = s;
    }
  }
  return units::from_mhz(0.5 * splitting_mhz);
}

FitResult fit_g_distribution(const SpectrumData& bus, const SpectrumData& drop,
                             const SpectraByG& table, const GFitOptions& options) {
  bus.validate(5);
  drop.validate(5);
  if (table.g_grid.size() < 2) {
    throw std::invalid_argument("g fit: table needs at least two couplings");
  }
  auto objective = [&](std::span<const double> p) {
    return g_distribution_residual(table, bus, drop, p[0], p[1]);
  };
  const double g0 = options.initial_g_mean > 0.0 ? options.initial_g_mean : initial_g_guess(drop);
  const double s0 = options.initial_g_sigma > 0.0 ? options.initial_g_sigma : 0.3 * g0;

  FitResult result;
  result.names = {"g_mean", "g_sigma"};
  const std::vector<double> x0{g0, s0};
  result.initial_residual = objective(x0);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> jitter(-options.jitter, options.jitter);
  SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    std::vector<double> start = x0;
    if (r > 0) {
      start[0] *= 1.0 + jitter(rng);
      start[1] *= 1.0 + jitter(rng);
    }
    const std::vector<double> steps{0.2 * start[0], 0.5 * start[1]};
    SimplexResult run = nelder_mead(objective, start, steps, options.simplex);
    result.iterations += run.iterations;
    if (run.value < best.value) {
      best = run;
    }
  }
  result.parameters = {best.x[0], std::abs(best.x[1])};
  result.residual = best.value;
  result.converged = best.converged && best.value <= result.initial_residual;
  result.boundary_warning =
      best.x[0] < table.g_grid.front() || best.x[0] > table.g_grid.back();
  return result;
}

PortData read_spectrum_data(std::istream& in) {
  PortData data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double cols[5];
    int count = 0;
    while (count < 5 && fields >> cols[count]) {
      ++count;
    }
    if (count == 0 && data.bus.size() == 0) {
      continue;  // column header
    }
    if (count != 5) {
      throw std::invalid_argument(fmt::format("spectrum data line {}: expected 5 numeric columns", line_no));
    }
    data.bus.detuning_mhz.push_back(cols[0]);
    data.bus.values.push_back(cols[1]);
    data.bus.sigma.push_back(cols[2]);
    data.drop.detuning_mhz.push_back(cols[0]);
    data.drop.values.push_back(cols[3]);
    data.drop.sigma.push_back(cols[4]);
  }
  return data;
}

void write_spectrum_data(std::ostream& out, const PortData& data) {
  out << "detuning_MHz,T_bus,T_bus_sigma,T_drop,T_drop_sigma\n";
  for (std::size_t i = 0; i < data.bus.size(); ++i) {
    const double sb = data.bus.sigma.empty() ? 1.0 : data.bus.sigma[i];
    const double sd = data.drop.sigma.empty() ? 1.0 : data.drop.sigma[i];
    out << fmt::format("{:.10g},{:.10g},{:.10g},{:.10g},{:.10g}\n", data.bus.detuning_mhz[i],
                       data.bus.values[i], sb, data.drop.values[i], sd);
  }
}

}  // namespace atomswitch::fit
