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

#include "atomswitch/transit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "atomswitch/parallel.hpp"

namespace atomswitch::transit {
namespace {

std::size_t edge_count(std::size_t n) { return std::max<std::size_t>(1, n / 10); }

double edge_mean(std::span<const double> v) {
  const std::size_t k = edge_count(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sum += v[i] + v[v.size() - 1 - i];
  }
  return sum / static_cast<double>(2 * k);
}

double bus_transmission(const HilbertSpace& space, SystemParams p, double g) {
  p.g = g;
  return transmissions(space, p).t_bus;
}

}  // namespace

void TransitConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be > 0");
    }
  };
  if (!(g_peak >= 0.0) || !std::isfinite(g_peak)) {
    throw std::invalid_argument("g_peak must be >= 0");
  }
  positive(transit_sigma, "transit_sigma");
  positive(flux_in, "flux_in");
  positive(detection_efficiency, "detection_efficiency");
  positive(timebin, "timebin");
  positive(duration, "duration");
  if (detection_efficiency > 1.0) {
    throw std::invalid_argument("detection_efficiency must be <= 1");
  }
  if (!(bus_floor >= 0.0) || bus_floor > 1.0) {
    throw std::invalid_argument("bus_floor must lie in [0, 1]");
  }
  if (timebin > duration) {
    throw std::invalid_argument("timebin must not exceed duration");
  }
}

std::size_t TransitConfig::bins() const {
  return static_cast<std::size_t>(std::llround(std::floor(duration / timebin + 1e-9)));
}

void TriggerConfig::validate() const {
  if (threshold_counts < 1) {
    throw std::invalid_argument("trigger threshold must be >= 1");
  }
  if (!(window > 0.0)) {
    throw std::invalid_argument("trigger window must be > 0");
  }
  if (!(latency >= 0.0)) {
    throw std::invalid_argument("trigger latency must be >= 0");
  }
}

double g_profile(const TransitConfig& cfg, double t) {
  const double x = (t - cfg.center()) / cfg.transit_sigma;
  return cfg.g_peak * std::exp(-0.5 * x * x);
}

TransitModel transit_model(const HilbertSpace& space, const SystemParams& base,
                           const TransitConfig& cfg, unsigned workers) {
  cfg.validate();
  SystemParams p = base;
  p.flux_in = cfg.flux_in;
  const std::size_t n = cfg.bins();
  TransitModel m;
  m.bin_center_us.resize(n);
  m.g.resize(n);
  m.t_bus.resize(n);
  m.t_drop.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.bin_center_us[i] = (static_cast<double>(i) + 0.5) * cfg.timebin;
    m.g[i] = g_profile(cfg, m.bin_center_us[i]);
  }
  parallel_for(n, workers, [&](std::size_t i) {
    SystemParams q = p;
    q.g = m.g[i];
    const Transmissions t = transmissions(space, q);
    m.t_bus[i] = t.t_bus + cfg.bus_floor;
    m.t_drop[i] = t.t_drop;
  });
  return m;
}

std::vector<double> run_trigger(std::span<const double> events, const TriggerConfig& trigger,
                                double horizon_us) {
  trigger.validate();
  std::vector<double> fired;
  std::size_t start = 0;
  bool armed = true;
  for (std::size_t j = 0; j < events.size(); ++j) {
    if (j > 0 && events[j] < events[j - 1]) {
      throw std::invalid_argument("run_trigger: event times must be sorted");
    }
    while (events[start] <= events[j] - trigger.window) {
      ++start;
    }
    const auto count = static_cast<long>(j - start + 1);
    if (!armed && count < trigger.threshold_counts) {
      armed = true;
    }
    if (armed && count >= trigger.threshold_counts) {
      armed = false;
      const double t = events[j] + trigger.latency;
      if (t <= horizon_us) {
        fired.push_back(t);
      }
    }
  }
  return fired;
}

TransitTrace simulate_transit(const TransitModel& model, const TransitConfig& cfg,
                              const TriggerConfig& trigger, std::uint64_t seed) {
  cfg.validate();
  trigger.validate();
  if (model.bin_center_us.size() != cfg.bins()) {
    throw std::invalid_argument("simulate_transit: model binning differs from the config");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto draw = [&](double mean) {
    if (!(mean > 0.0)) {
      return 0;
    }
    return std::poisson_distribution<int>(mean)(rng);
  };

  const double scale = cfg.flux_in * cfg.detection_efficiency * cfg.timebin;
  TransitTrace trace;
  trace.bin_center_us = model.bin_center_us;
  trace.bus_counts.resize(model.bin_center_us.size());
  trace.drop_counts.resize(model.bin_center_us.size());
  std::vector<double> events;
  for (std::size_t i = 0; i < model.bin_center_us.size(); ++i) {
    trace.bus_counts[i] = draw(model.t_bus[i] * scale);
    trace.drop_counts[i] = draw(model.t_drop[i] * scale);
    const double bin_start = static_cast<double>(i) * cfg.timebin;
    const std::size_t first = events.size();
    for (int k = 0; k < trace.bus_counts[i]; ++k) {
      events.push_back(bin_start + cfg.timebin * uniform(rng));
    }
    std::sort(events.begin() + static_cast<std::ptrdiff_t>(first), events.end());
  }
  trace.trigger_times_us = run_trigger(events, trigger, cfg.duration);
  return trace;
}

TransitTrace simulate_transit(const HilbertSpace& space, const SystemParams& base,
                              const TransitConfig& cfg, const TriggerConfig& trigger) {
  return simulate_transit(transit_model(space, base, cfg), cfg, trigger, cfg.rng_seed);
}

std::vector<TransitTrace> simulate_transits(const TransitModel& model, const TransitConfig& cfg,
                                            const TriggerConfig& trigger, std::size_t count,
                                            unsigned workers) {
  std::vector<TransitTrace> traces(count);
  parallel_for(count, workers, [&](std::size_t k) {
    traces[k] = simulate_transit(model, cfg, trigger, cfg.rng_seed + k);
  });
  return traces;
}

AveragedTrace average_aligned(std::span<const TransitTrace> traces, const TransitConfig& cfg) {
  if (traces.empty()) {
    throw std::invalid_argument("average_aligned: no traces");
  }
  cfg.validate();
  const std::vector<double>& centers = traces.front().bin_center_us;
  const std::size_t n = centers.size();
  for (const TransitTrace& t : traces) {
    if (t.bin_center_us != centers || t.bus_counts.size() != n || t.drop_counts.size() != n) {
      throw std::invalid_argument("average_aligned: traces do not share a binning");
    }
  }
  AveragedTrace avg;
  avg.transits = traces.size();
  avg.time_us.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    avg.time_us[i] = centers[i] - cfg.center();
  }
  avg.mean_bus_counts.assign(n, 0.0);
  avg.mean_drop_counts.assign(n, 0.0);
  std::vector<double> contributors(n, 0.0);

  std::vector<double> bus(n);
  for (const TransitTrace& t : traces) {
    std::copy(t.bus_counts.begin(), t.bus_counts.end(), bus.begin());
    const double bg = edge_mean(bus);
    double mass = 0.0;
    double moment = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = std::max(0.0, bus[i] - bg);
      mass += w;
      moment += w * centers[i];
    }
    const long shift =
        mass > 0.0 ? std::lround((moment / mass - cfg.center()) / cfg.timebin) : 0L;
    for (std::size_t i = 0; i < n; ++i) {
      const long src = static_cast<long>(i) + shift;
      if (src < 0 || src >= static_cast<long>(n)) {
        continue;
      }
      avg.mean_bus_counts[i] += t.bus_counts[static_cast<std::size_t>(src)];
      avg.mean_drop_counts[i] += t.drop_counts[static_cast<std::size_t>(src)];
      contributors[i] += 1.0;
    }
  }
  const double scale = cfg.flux_in * cfg.detection_efficiency * cfg.timebin;
  avg.t_bus.resize(n);
  avg.t_drop.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (contributors[i] > 0.0) {
      avg.mean_bus_counts[i] /= contributors[i];
      avg.mean_drop_counts[i] /= contributors[i];
    }
    avg.t_bus[i] = avg.mean_bus_counts[i] / scale;
    avg.t_drop[i] = avg.mean_drop_counts[i] / scale;
  }
  return avg;
}

double fwhm(std::span<const double> time, std::span<const double> values) {
  if (time.size() != values.size() || time.size() < 3) {
    throw std::invalid_argument("fwhm: need at least 3 matching samples");
  }
  const double bg = edge_mean(values);
  const auto peak_it = std::max_element(values.begin(), values.end());
  const std::size_t ip = static_cast<std::size_t>(peak_it - values.begin());
  const double half = bg + 0.5 * (*peak_it - bg);
  if (!(*peak_it > bg)) {
    return 0.0;
  }
  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double v0 = values[inside];
    const double v1 = values[outside];
    const double f = (v0 - half) / (v0 - v1);
    return time[inside] + f * (time[outside] - time[inside]);
  };
  std::size_t l = ip;
  while (l > 0 && values[l - 1] > half) {
    --l;
  }
  std::size_t r = ip;
  while (r + 1 < values.size() && values[r + 1] > half) {
    ++r;
  }
  const double left = l > 0 ? crossing(l, l - 1) : time.front();
  const double right = r + 1 < values.size() ? crossing(r, r + 1) : time.back();
  return right - left;
}

double peak_window_sum(std::span<const double> values, std::size_t window_bins) {
  if (window_bins == 0 || window_bins > values.size()) {
    throw std::invalid_argument("peak_window_sum: window must fit inside the trace");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < window_bins; ++i) {
    sum += values[i];
  }
  double best = sum;
  for (std::size_t i = window_bins; i < values.size(); ++i) {
    sum += values[i] - values[i - window_bins];
    best = std::max(best, sum);
  }
  return best;
}

double calibrate_transit_sigma(const HilbertSpace& space, const SystemParams& base,
                               const TransitConfig& cfg, double target_fwhm_us) {
  if (!(cfg.g_peak > 0.0) || !(target_fwhm_us > 0.0)) {
    throw std::invalid_argument("calibrate_transit_sigma needs g_peak > 0 and a positive target");
  }
  SystemParams p = base;
  p.flux_in = cfg.flux_in;
  const double t0 = bus_transmission(space, p, 0.0);
  const double t_peak = bus_transmission(space, p, cfg.g_peak);
  const double half = 0.5 * (t0 + t_peak);
  // T_bus(g) rises monotonically from the critically coupled floor.
  double lo = 0.0;
  double hi = cfg.g_peak;
  for (int it = 0; it < 80 && hi - lo > 1e-12 * cfg.g_peak; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bus_transmission(space, p, mid) < half ? lo : hi) = mid;
  }
  const double g_half = 0.5 * (lo + hi);
  return target_fwhm_us / (2.0 * std::sqrt(2.0 * std::log(cfg.g_peak / g_half)));
}

DetectionCalibration calibrate_detection(const HilbertSpace& space, const SystemParams& base,
                                         const TransitConfig& cfg, const TriggerConfig& trigger,
                                         double background, double peak) {
  trigger.validate();
  if (!(peak > background) || !(background >= 0.0)) {
    throw std::invalid_argument("calibrate_detection needs 0 <= background < peak");
  }
  TransitConfig bare = cfg;
  bare.bus_floor = 0.0;
  bare.detection_efficiency = 1.0;
  const TransitModel m = transit_model(space, base, bare);
  const auto window_bins =
      static_cast<std::size_t>(std::max(1L, std::lround(trigger.window / cfg.timebin)));
  const double exposure = cfg.flux_in * cfg.timebin;
  const double a = exposure * peak_window_sum(m.t_bus, window_bins);
  const double b = exposure * static_cast<double>(window_bins) * edge_mean(m.t_bus);
  const double w = exposure * static_cast<double>(window_bins);

  DetectionCalibration cal;
  cal.detection_efficiency = (peak - background) / (a - b);
  cal.bus_floor = background / (cal.detection_efficiency * w) - b / w;
  if (cal.bus_floor < 0.0) {
    cal.bus_floor = 0.0;
    cal.detection_efficiency = peak / a;
  }
  return cal;
}

}  // namespace atomswitch::transit
