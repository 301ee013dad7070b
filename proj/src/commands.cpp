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

#include "atomswitch/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "atomswitch/analytics.hpp"
#include "atomswitch/errors.hpp"
#include "atomswitch/fit.hpp"
#include "atomswitch/output.hpp"
#include "atomswitch/parallel.hpp"
#include "atomswitch/units.hpp"

namespace atomswitch {
namespace {

using units::from_mhz;
using units::to_mhz;

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  }
  return v;
}

struct Coupling {
  std::vector<double> g;  // rad/us
  std::vector<double> weights;
  double mean = 0.0;
};

Coupling coupling(const RunConfig& cfg) {
  if (!cfg.ensemble.enabled) {
    const double g = from_mhz(cfg.system.g_mhz);
    return {{g}, {1.0}, g};
  }
  const GDistribution dist = config_distribution(cfg);
  return {dist.grid(), gaussian_weights(dist), dist.g_mean};
}

SystemParams critical(SystemParams p, double h) {
  p.kappa_bus = analytics::critical_kappa_bus({p.kappa_i, p.kappa_drop, h});
  return p;
}

void reject_no_atom(const CommandOptions& options, const char* command) {
  if (options.no_atom) {
    throw UsageError(fmt::format("{}: --no-atom is only meaningful for spectrum and g2", command));
  }
}

std::filesystem::path output_path(const RunConfig& cfg, const std::string& name) {
  return cfg.run.out / name;
}

void emit(CommandResult& result, const RunConfig& cfg, const std::string& name,
          const std::string& command, const std::vector<std::string>& notes, const Table& table) {
  const auto path = output_path(cfg, name);
  write_table(path, command, notes, cfg, table);
  result.files.push_back(path);
}

std::size_t nearest(const std::vector<double>& grid, double x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(grid[i] - x) < std::abs(grid[best] - x)) {
      best = i;
    }
  }
  return best;
}

std::string g_note(const RunConfig& cfg) {
  if (!cfg.ensemble.enabled) {
    return fmt::format("coupling: single g = {} MHz", format_number(cfg.system.g_mhz));
  }
  return fmt::format("coupling: Gaussian ensemble, mean {} MHz, sigma {} MHz, {} grid points on [{}, {}] MHz",
                     format_number(cfg.ensemble.g_mean_mhz), format_number(cfg.ensemble.g_sigma_mhz),
                     cfg.ensemble.grid_points, format_number(cfg.ensemble.grid_min_mhz),
                     format_number(cfg.ensemble.grid_max_mhz));
}

std::vector<std::string> rate_notes(const SystemParams& p) {
  return {fmt::format("rates (MHz): kappa_i {} kappa_bus {} kappa_drop {} kappa {} gamma {}",
                      format_number(to_mhz(p.kappa_i)), format_number(to_mhz(p.kappa_bus)),
                      format_number(to_mhz(p.kappa_drop)), format_number(to_mhz(p.kappa())),
                      format_number(to_mhz(p.gamma)))};
}

constexpr double kMinResolvableTransmission = 1e-4;

const char* kRecoveryNote =
    "recovery R = [(T_at_bus + T_at_drop) + (T0_bus + T0_drop)] / 2, the fiber throughput "
    "averaged with equal weight over the coupled and uncoupled atom states";
const char* kFidelityNote = "fidelity F = (T_at_bus + T0_drop) / 2";
const char* kNegativityNote =
    "negativity = ||rho^T_A||_1 - 1 of the atom (coupled, uncoupled) x path (bus, drop, lost) state "
    "at zero detuning";

}  // namespace

CommandResult cmd_spectrum(const RunConfig& cfg, const CommandOptions& options) {
  const std::vector<double> det = config_detunings(cfg);
  if (det.empty()) {
    throw UsageError("spectrum: empty detuning grid");
  }
  std::vector<std::string> cases = cfg.spectrum.cases;
  if (options.no_atom) {
    cases = {"empty"};
  }
  if (cases.empty()) {
    throw UsageError("spectrum: no cases requested");
  }
  const HilbertSpace space = config_space(cfg);
  const SystemParams params = config_system(cfg);
  const unsigned workers = cfg.run.workers;

  CommandResult result;
  for (const std::string& name : cases) {
    Spectrum s;
    std::vector<std::string> notes = rate_notes(params);
    if (name == "single") {
      s = spectrum(space, params, det, workers);
      notes.push_back(fmt::format("case: single atom, g = {} MHz", format_number(cfg.system.g_mhz)));
    } else if (name == "ensemble") {
      if (!cfg.ensemble.enabled) {
        throw ConfigError("spectrum case 'ensemble' needs ensemble.enabled = true");
      }
      const Coupling c = coupling(cfg);
      const SpectraByG table = compute_spectra_by_g(space, params, c.g, det, workers);
      s = ensemble_spectrum(table.spectra, c.weights);
      notes.push_back("case: " + g_note(cfg));
    } else {
      SystemParams empty = params;
      empty.g = 0.0;
      s = spectrum(space, empty, det, workers);
      notes.push_back("case: empty resonator, g = 0");
    }
    notes.push_back(fmt::format("T_bus_measured = T_bus + {} (system.bus_floor)",
                                format_number(cfg.system.bus_floor)));
    Table table{{"detuning_MHz", "T_bus", "T_drop", "loss", "T_bus_measured"}, {}};
    for (std::size_t i = 0; i < s.size(); ++i) {
      table.add_row({s.detuning_mhz[i], s.t_bus[i], s.t_drop[i], s.loss[i],
                     s.t_bus[i] + cfg.system.bus_floor});
    }
    emit(result, cfg, "spectrum_" + name + ".csv", "spectrum", notes, table);
    const std::size_t k = nearest(s.detuning_mhz, 0.0);
    result.summary.push_back(fmt::format("spectrum {}: at {} MHz T_bus = {:.4f}, T_drop = {:.4f}",
                                         name, format_number(s.detuning_mhz[k]), s.t_bus[k],
                                         s.t_drop[k]));
  }
  return result;
}

CommandResult cmd_g2(const RunConfig& cfg, const CommandOptions& options) {
  const std::vector<double> taus = linspace(0.0, cfg.g2.tau_max_us, cfg.g2.tau_points);
  const HilbertSpace space = build_space(cfg.g2.n_max);
  SystemParams params = config_system(cfg);
  params.flux_in = cfg.g2.flux_per_us;
  const unsigned workers = cfg.run.workers;

  Table table{{"tau_us", "tau_kappa"}, {}};
  std::vector<std::vector<double>> columns;
  std::vector<std::string> notes = rate_notes(params);
  notes.push_back(fmt::format("input flux {} photons/us, n_max {}", format_number(params.flux_in),
                              cfg.g2.n_max));

  if (!options.no_atom) {
    G2Curve bus;
    G2Curve drop;
    if (cfg.g2.ensemble && cfg.ensemble.enabled) {
      const Coupling c = coupling(cfg);
      const std::size_t n = c.g.size();
      std::vector<Correlation> corr(2 * n);
      parallel_for(2 * n, workers, [&](std::size_t i) {
        SystemParams p = params;
        p.g = c.g[i % n];
        corr[i] = intensity_correlation(space, p, i < n ? Port::Bus : Port::Drop, taus);
      });
      bus = ensemble_g2(std::span(corr).first(n), c.weights);
      drop = ensemble_g2(std::span(corr).subspan(n), c.weights);
      notes.push_back(g_note(cfg));
      notes.push_back("ensemble g2 = sum_k w_k G_k(tau) / sum_k w_k <n_k>^2");
    } else {
      bus = g2_curve(space, params, Port::Bus, taus);
      drop = g2_curve(space, params, Port::Drop, taus);
      notes.push_back(fmt::format("coupling: single g = {} MHz", format_number(cfg.system.g_mhz)));
    }
    table.columns.insert(table.columns.end(), {"g2_bus", "g2_drop"});
    columns.push_back(bus.values);
    columns.push_back(drop.values);
  }

  SystemParams empty = params;
  empty.g = 0.0;
  const Transmissions empty_t = transmissions(space, empty);
  for (Port port : {Port::Bus, Port::Drop}) {
    std::vector<double> values(taus.size(), std::nan(""));
    const double t = port == Port::Bus ? empty_t.t_bus : empty_t.t_drop;
    const char* port_name = port == Port::Bus ? "bus" : "drop";
    if (t < kMinResolvableTransmission) {
      // The output is a near-total cancellation of drive and resonator field.
      notes.push_back(fmt::format("empty resonator {} transmission {:.3g} is extinguished, "
                                  "g2 not resolvable (nan)", port_name, t));
    } else {
      try {
        values = g2_curve(space, empty, port, taus).values;
      } catch (const UndefinedCorrelationError&) {
        notes.push_back(fmt::format("empty resonator {} output vanishes, g2 undefined", port_name));
      }
    }
    table.columns.push_back(port == Port::Bus ? "g2_bus_empty" : "g2_drop_empty");
    columns.push_back(std::move(values));
  }

  for (std::size_t i = 0; i < taus.size(); ++i) {
    std::vector<double> row{taus[i], taus[i] * params.kappa()};
    for (const auto& c : columns) {
      row.push_back(c[i]);
    }
    table.add_row(std::move(row));
  }
  CommandResult result;
  emit(result, cfg, "g2.csv", "g2", notes, table);
  const auto& first = table.rows.front();
  const auto& last = table.rows.back();
  for (std::size_t c = 2; c < table.columns.size(); ++c) {
    result.summary.push_back(fmt::format("{}: tau=0 {:.4f}, tau={} us {:.4f}", table.columns[c],
                                         first[c], format_number(last[0]), last[c]));
  }
  return result;
}

CommandResult cmd_kappa_sweep(const RunConfig& cfg, const CommandOptions& options) {
  reject_no_atom(options, "kappa-sweep");
  const HilbertSpace space = config_space(cfg);
  const SystemParams base = config_system(cfg);
  const double h = from_mhz(cfg.system.h_mhz);
  const Coupling c = coupling(cfg);

  Table table{{"kappa_MHz", "kappa_bus_MHz", "kappa_drop_MHz", "T_at_bus", "T_at_drop", "T0_bus",
               "T0_drop", "F", "R", "N0", "negativity"},
              {}};
  for (double kd : linspace(cfg.sweep.kappa_drop_min_mhz, cfg.sweep.kappa_drop_max_mhz,
                            cfg.sweep.points)) {
    SystemParams p = base;
    p.kappa_drop = from_mhz(kd);
    p = critical(p, h);
    const OperatingPoint op = evaluate_operating_point(space, p, c.g, c.weights, c.mean,
                                                       cfg.run.workers);
    table.add_row({to_mhz(p.kappa()), to_mhz(p.kappa_bus), kd, op.coupled.t_bus, op.coupled.t_drop,
                   op.uncoupled.t_bus, op.uncoupled.t_drop, op.metrics.fidelity,
                   op.metrics.recovery, op.metrics.n0, op.metrics.negativity});
  }
  const std::vector<double> f = table.values("F");
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
  const std::vector<std::string> notes{
      "kappa_bus re-solved to critical coupling at every point (h included)", g_note(cfg),
      kFidelityNote, kRecoveryNote, kNegativityNote};
  CommandResult result;
  emit(result, cfg, "kappa_sweep.csv", "kappa-sweep", notes, table);
  result.summary.push_back(fmt::format("kappa-sweep: max F = {:.4f} at kappa = {:.2f} MHz",
                                       f[best], table.rows[best][0]));
  return result;
}

CommandResult cmd_metrics(const RunConfig& cfg, const CommandOptions& options) {
  reject_no_atom(options, "metrics");
  const HilbertSpace space = config_space(cfg);
  const SystemParams p = config_system(cfg);
  const Coupling c = coupling(cfg);
  const OperatingPoint op = evaluate_operating_point(space, p, c.g, c.weights, c.mean,
                                                     cfg.run.workers);
  const auto& m = op.metrics;
  Table table{{"kappa_MHz", "kappa_bus_MHz", "kappa_drop_MHz", "T_at_bus", "T_at_drop", "T0_bus",
               "T0_drop", "F", "R", "contrast_bus_dB", "contrast_drop_dB", "N0", "negativity"},
              {}};
  table.add_row({to_mhz(p.kappa()), to_mhz(p.kappa_bus), to_mhz(p.kappa_drop), op.coupled.t_bus,
                 op.coupled.t_drop, op.uncoupled.t_bus, op.uncoupled.t_drop, m.fidelity,
                 m.recovery, m.contrast_bus_db.value_or(std::nan("")),
                 m.contrast_drop_db.value_or(std::nan("")), m.n0, m.negativity});
  std::vector<std::string> notes = rate_notes(p);
  notes.insert(notes.end(), {g_note(cfg), kFidelityNote, kRecoveryNote, kNegativityNote,
                             "contrast nan: infinite (vanishing uncoupled-state transmission)"});
  CommandResult result;
  emit(result, cfg, "metrics.csv", "metrics", notes, table);
  result.summary.push_back(fmt::format("metrics: F = {:.4f}, R = {:.4f}, negativity = {:.4f}, N0 = {:.3f}",
                                       m.fidelity, m.recovery, m.negativity, m.n0));
  return result;
}

CommandResult cmd_project(const RunConfig& cfg, const CommandOptions& options) {
  reject_no_atom(options, "project");
  const auto& pr = cfg.project;
  const HilbertSpace space = config_space(cfg);
  SystemParams base = config_system(cfg);
  base.kappa_i /= pr.q_improvement;
  const double h = from_mhz(cfg.system.h_mhz);
  const double g = from_mhz(pr.g_mhz);

  Coupling c{{g}, {1.0}, g};
  if (pr.g_sigma_mhz > 0.0) {
    const double s = from_mhz(pr.g_sigma_mhz);
    GDistribution dist{g, s, std::max(0.0, g - 3.0 * s), g + 3.0 * s, cfg.ensemble.grid_points};
    c = {dist.grid(), gaussian_weights(dist), g};
  }

  Table table{{"kappa_MHz", "kappa_bus_MHz", "kappa_drop_MHz", "T_at_bus", "T_at_drop", "T0_bus",
               "T0_drop", "F", "R", "N0", "negativity"},
              {}};
  for (double kd : linspace(pr.kappa_drop_min_mhz, pr.kappa_drop_max_mhz, pr.points)) {
    SystemParams p = base;
    p.kappa_drop = from_mhz(kd);
    p = critical(p, h);
    const OperatingPoint op = evaluate_operating_point(space, p, c.g, c.weights, c.mean,
                                                       cfg.run.workers);
    table.add_row({to_mhz(p.kappa()), to_mhz(p.kappa_bus), kd, op.coupled.t_bus, op.coupled.t_drop,
                   op.uncoupled.t_bus, op.uncoupled.t_drop, op.metrics.fidelity,
                   op.metrics.recovery, op.metrics.n0, op.metrics.negativity});
  }
  const std::vector<double> f = table.values("F");
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
  const auto& row = table.rows[best];
  const double best_n = row[table.column("negativity")];

  const std::vector<std::string> notes{
      "assumptions:",
      fmt::format("  kappa_i reduced by the quality-factor improvement {}: {} -> {} MHz",
                  format_number(pr.q_improvement), format_number(cfg.system.kappa_i_mhz),
                  format_number(to_mhz(base.kappa_i))),
      fmt::format("  coupling g = {} MHz with sigma_g = {} MHz", format_number(pr.g_mhz),
                  format_number(pr.g_sigma_mhz)),
      fmt::format("  gamma = {} MHz, h = {} MHz, flux = {} photons/us", format_number(cfg.system.gamma_mhz),
                  format_number(cfg.system.h_mhz), format_number(cfg.system.flux_per_us)),
      "  kappa_drop scanned, kappa_bus held at critical coupling", kFidelityNote, kNegativityNote,
      fmt::format("best: F = {} negativity = {} at kappa = {} MHz (kappa_drop = {} MHz)",
                  format_number(f[best]), format_number(best_n), format_number(row[0]),
                  format_number(row[2]))};
  CommandResult result;
  emit(result, cfg, "project.csv", "project", notes, table);
  result.summary.push_back(fmt::format("project: best F = {:.4f}, negativity = {:.4f} at kappa = {:.2f} MHz",
                                       f[best], best_n, row[0]));
  return result;
}

CommandResult cmd_fit(const RunConfig& cfg, const CommandOptions& options) {
  reject_no_atom(options, "fit");
  const HilbertSpace space = config_space(cfg);
  const SystemParams params = config_system(cfg);
  const std::vector<double> grid = config_distribution(cfg).grid();

  fit::PortData data;
  SpectraByG table;
  const bool synthetic = cfg.fit.data.empty();
  if (synthetic) {
    const std::vector<double> det = config_detunings(cfg);
    if (det.empty()) {
      throw UsageError("fit: empty detuning grid");
    }
    table = compute_spectra_by_g(space, params, grid, det, cfg.run.workers);
    const std::vector<double> w = gaussian_weights(grid, from_mhz(cfg.fit.truth_g_mean_mhz),
                                                   from_mhz(cfg.fit.truth_g_sigma_mhz));
    const Spectrum clean = ensemble_spectrum(table.spectra, w);
    std::mt19937_64 rng(cfg.run.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double sigma = cfg.fit.synthetic_noise;
    for (fit::SpectrumData* port : {&data.bus, &data.drop}) {
      port->detuning_mhz = det;
    }
    for (std::size_t i = 0; i < det.size(); ++i) {
      data.bus.values.push_back(clean.t_bus[i] + sigma * noise(rng));
      data.drop.values.push_back(clean.t_drop[i] + sigma * noise(rng));
    }
    if (sigma > 0.0) {
      data.bus.sigma.assign(det.size(), sigma);
      data.drop.sigma.assign(det.size(), sigma);
    }
  } else {
    std::ifstream in(cfg.fit.data);
    if (!in) {
      throw ConfigError("fit: cannot open data file '" + cfg.fit.data + "'");
    }
    data = fit::read_spectrum_data(in);
    table = compute_spectra_by_g(space, params, grid, data.bus.detuning_mhz, cfg.run.workers);
  }

  fit::GFitOptions opts;
  opts.restarts = cfg.fit.restarts;
  opts.seed = cfg.run.seed;
  const fit::FitResult r = fit::fit_g_distribution(data.bus, data.drop, table, opts);
  const double g_mean = to_mhz(r.parameters[0]);
  const double g_sigma = to_mhz(r.parameters[1]);

  const fit::FitResult lor =
      fit::fit_lorentzian(data.bus, fit::initial_lorentzian_guess(data.bus));
  const analytics::LorentzianShape shape = fit::to_shape(lor);

  CommandResult result;
  std::vector<std::string> notes = rate_notes(params);
  notes.push_back(synthetic ? fmt::format("synthetic data: truth mean {} MHz sigma {} MHz, noise {} "
                                          "(absolute, Gaussian)",
                                          format_number(cfg.fit.truth_g_mean_mhz),
                                          format_number(cfg.fit.truth_g_sigma_mhz),
                                          format_number(cfg.fit.synthetic_noise))
                            : "data file: " + cfg.fit.data);
  {
    std::ostringstream body;
    fit::write_spectrum_data(body, data);
    const auto path = output_path(cfg, "fit_data.csv");
    write_text(path, config_header("fit", notes, cfg) + body.str());
    result.files.push_back(path);
  }

  std::string text = config_header("fit", notes, cfg);
  auto kv = [&](const std::string& key, const std::string& value) {
    text += key + " = " + value + "\n";
  };
  kv("g_mean_mhz", format_number(g_mean));
  kv("g_sigma_mhz", format_number(g_sigma));
  kv("residual", format_number(r.residual));
  kv("initial_residual", format_number(r.initial_residual));
  kv("iterations", std::to_string(r.iterations));
  kv("converged", r.converged ? "true" : "false");
  kv("boundary_warning", r.boundary_warning ? "true" : "false");
  kv("points", std::to_string(data.bus.size()));
  if (synthetic) {
    kv("g_mean_relative_error",
       format_number(g_mean / cfg.fit.truth_g_mean_mhz - 1.0));
    kv("g_sigma_relative_error",
       format_number(g_sigma / cfg.fit.truth_g_sigma_mhz - 1.0));
  }
  kv("lorentzian_bus_center_mhz", format_number(shape.center));
  kv("lorentzian_bus_half_width_mhz", format_number(shape.half_width));
  kv("lorentzian_bus_amplitude", format_number(shape.amplitude));
  kv("lorentzian_bus_offset", format_number(shape.offset));
  kv("lorentzian_bus_residual", format_number(lor.residual));
  kv("lorentzian_bus_converged", lor.converged ? "true" : "false");
  const auto path = output_path(cfg, "fit_result.txt");
  write_text(path, text);
  result.files.push_back(path);

  result.summary.push_back(fmt::format("fit: g_mean = {:.3f} MHz, g_sigma = {:.3f} MHz, residual = {:.4g}{}",
                                       g_mean, g_sigma, r.residual,
                                       r.converged ? "" : " (not converged)"));
  if (r.boundary_warning) {
    result.summary.push_back("fit: warning, g_mean lies outside the coupling grid");
  }
  if (!r.converged) {
    result.status = kExitNumerical;
  }
  return result;
}

CommandResult cmd_transit(const RunConfig& cfg, const CommandOptions& options) {
  reject_no_atom(options, "transit");
  const HilbertSpace space = config_space(cfg);
  const SystemParams base = config_system(cfg);
  transit::TransitConfig tc = config_transit(cfg);
  const transit::TriggerConfig trig = config_trigger(cfg);
  const bool calibrated = !cfg.transit.transit_sigma_us.has_value();
  if (calibrated) {
    tc.transit_sigma = transit::calibrate_transit_sigma(space, base, tc, cfg.transit.target_fwhm_us);
  } else {
    tc.transit_sigma = *cfg.transit.transit_sigma_us;
  }
  const transit::TransitModel model = transit::transit_model(space, base, tc, cfg.run.workers);
  const auto count = static_cast<std::size_t>(cfg.transit.transits);
  const std::vector<transit::TransitTrace> traces =
      transit::simulate_transits(model, tc, trig, count, cfg.run.workers);
  const transit::AveragedTrace avg = transit::average_aligned(traces, tc);

  const double width = transit::fwhm(avg.time_us, avg.t_bus);
  const auto window_bins =
      static_cast<std::size_t>(std::max(1L, std::lround(trig.window / tc.timebin)));
  const double peak = transit::peak_window_sum(avg.mean_bus_counts, window_bins);
  const auto fired = static_cast<std::size_t>(std::count_if(
      traces.begin(), traces.end(), [](const auto& t) { return !t.trigger_times_us.empty(); }));
  const double fraction = static_cast<double>(fired) / static_cast<double>(count);

  std::vector<std::string> notes = rate_notes(base);
  notes.push_back(fmt::format("transit sigma {} us ({})", format_number(tc.transit_sigma),
                              calibrated ? "calibrated to target FWHM" : "configured"));
  notes.push_back(fmt::format("averaged bus FWHM {} us, peak bus counts per {} us window {}, "
                              "trigger fraction {}",
                              format_number(width), format_number(trig.window),
                              format_number(peak), format_number(fraction)));

  CommandResult result;
  {
    Table t{{"t_us", "g_MHz", "T_bus", "T_drop"}, {}};
    for (std::size_t i = 0; i < model.g.size(); ++i) {
      t.add_row({model.bin_center_us[i], to_mhz(model.g[i]), model.t_bus[i], model.t_drop[i]});
    }
    emit(result, cfg, "transit_model.csv", "transit", notes, t);
  }
  {
    Table t{{"transit", "t_us", "bus_counts", "drop_counts"}, {}};
    Table f{{"transit", "fire_us"}, {}};
    for (std::size_t k = 0; k < traces.size(); ++k) {
      const auto& tr = traces[k];
      for (std::size_t i = 0; i < tr.bin_center_us.size(); ++i) {
        t.add_row({static_cast<double>(k), tr.bin_center_us[i],
                   static_cast<double>(tr.bus_counts[i]), static_cast<double>(tr.drop_counts[i])});
      }
      for (double fire : tr.trigger_times_us) {
        f.add_row({static_cast<double>(k), fire});
      }
    }
    emit(result, cfg, "transit_traces.csv", "transit", notes, t);
    emit(result, cfg, "transit_triggers.csv", "transit", notes, f);
  }
  {
    Table t{{"t_us", "mean_bus_counts", "mean_drop_counts", "T_bus", "T_drop"}, {}};
    for (std::size_t i = 0; i < avg.time_us.size(); ++i) {
      t.add_row({avg.time_us[i], avg.mean_bus_counts[i], avg.mean_drop_counts[i], avg.t_bus[i],
                 avg.t_drop[i]});
    }
    emit(result, cfg, "transit_average.csv", "transit", notes, t);
  }
  result.summary.push_back(fmt::format(
      "transit: FWHM = {:.3f} us, peak = {:.3f} counts per window, trigger fraction = {:.3f}",
      width, peak, fraction));
  return result;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-atom controlled add-drop switch simulator", "atomswitch"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string preset_name = "paper-fig3";
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<int> n_max;
  bool no_atom = false;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--preset", preset_name, "built-in preset")
      ->check(CLI::IsMember(preset_names()));
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--n-max", n_max, "photon-number cutoff");
  app.add_flag("--no-atom", no_atom, "empty resonator only");

  using Command = CommandResult (*)(const RunConfig&, const CommandOptions&);
  const std::vector<std::pair<std::string, Command>> commands{
      {"spectrum", cmd_spectrum},       {"g2", cmd_g2},
      {"kappa-sweep", cmd_kappa_sweep}, {"fit", cmd_fit},
      {"transit", cmd_transit},         {"metrics", cmd_metrics},
      {"project", cmd_project}};
  const std::vector<std::string> help{
      "transmission spectra", "intensity correlations", "resonator decay sweep",
      "coupling-distribution fit", "atom transit simulation", "switch metrics at one point",
      "improved-parameter projection"};
  for (std::size_t i = 0; i < commands.size(); ++i) {
    app.add_subcommand(commands[i].first, help[i]);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  RunConfig cfg;
  try {
    cfg = preset(preset_name);
    if (!config_path.empty()) {
      cfg = load_config(config_path, cfg);
    }
    if (!out_dir.empty()) {
      cfg.run.out = out_dir;
    }
    if (seed) {
      cfg.run.seed = *seed;
    }
    if (workers) {
      cfg.run.workers = *workers;
    }
    if (n_max) {
      cfg.system.n_max = *n_max;
      cfg.g2.n_max = *n_max;
    }
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigInvalid;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const auto it = std::find_if(commands.begin(), commands.end(),
                               [&](const auto& c) { return c.first == name; });
  try {
    const CommandResult r = it->second(cfg, CommandOptions{no_atom});
    for (const auto& line : r.summary) {
      out << line << "\n";
    }
    for (const auto& f : r.files) {
      out << "wrote " << f.string() << "\n";
    }
    return r.status;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitConfigInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  return run_cli(args, out, err);
}

}  // namespace atomswitch
