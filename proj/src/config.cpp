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

#include "atomswitch/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "atomswitch/analytics.hpp"
#include "atomswitch/units.hpp"

namespace atomswitch {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, text));
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, text));
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") {
    return true;
  }
  if (t == "false" || t == "0" || t == "no" || t == "off") {
    return false;
  }
  throw ConfigError(fmt::format("{}: expected true/false, got '{}'", key, text));
}

std::string fmt_double(double v) { return fmt::format("{:.10g}", v); }

struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number(std::string section, std::string key, T RunConfig::* group, double T::* member) {
  const std::string full = section + "." + key;
  return {section, key,
          [=](RunConfig& c, const std::string& v) { (c.*group).*member = parse_double(full, v); },
          [=](const RunConfig& c) { return fmt_double((c.*group).*member); }};
}

template <typename T, typename I>
Field integer(std::string section, std::string key, T RunConfig::* group, I T::* member) {
  const std::string full = section + "." + key;
  return {section, key,
          [=](RunConfig& c, const std::string& v) {
            const long long x = parse_integer(full, v);
            if constexpr (std::is_unsigned_v<I>) {
              if (x < 0) {
                throw ConfigError(full + " must be >= 0");
              }
            }
            (c.*group).*member = static_cast<I>(x);
          },
          [=](const RunConfig& c) { return std::to_string((c.*group).*member); }};
}

template <typename T>
Field flag(std::string section, std::string key, T RunConfig::* group, bool T::* member) {
  const std::string full = section + "." + key;
  return {section, key,
          [=](RunConfig& c, const std::string& v) { (c.*group).*member = parse_bool(full, v); },
          [=](const RunConfig& c) { return std::string((c.*group).*member ? "true" : "false"); }};
}

// Numeric field where a keyword selects "unset".
template <typename T>
Field optional_number(std::string section, std::string key, std::string keyword,
                      T RunConfig::* group, std::optional<double> T::* member) {
  const std::string full = section + "." + key;
  return {section, key,
          [=](RunConfig& c, const std::string& v) {
            if (trim(v) == keyword) {
              ((c.*group).*member).reset();
            } else {
              (c.*group).*member = parse_double(full, v);
            }
          },
          [=](const RunConfig& c) {
            const auto& o = (c.*group).*member;
            return o ? fmt_double(*o) : keyword;
          }};
}

const std::vector<Field>& fields() {
  using C = RunConfig;
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(number("system", "kappa_i_mhz", &C::system, &C::System::kappa_i_mhz));
    f.push_back(number("system", "kappa_drop_mhz", &C::system, &C::System::kappa_drop_mhz));
    f.push_back(optional_number("system", "kappa_bus_mhz", "critical", &C::system,
                                &C::System::kappa_bus_mhz));
    f.push_back(number("system", "h_mhz", &C::system, &C::System::h_mhz));
    f.push_back(number("system", "gamma_mhz", &C::system, &C::System::gamma_mhz));
    f.push_back(number("system", "g_mhz", &C::system, &C::System::g_mhz));
    f.push_back(number("system", "delta_rl_mhz", &C::system, &C::System::delta_rl_mhz));
    f.push_back(number("system", "delta_al_mhz", &C::system, &C::System::delta_al_mhz));
    f.push_back(number("system", "flux_per_us", &C::system, &C::System::flux_per_us));
    f.push_back(integer("system", "n_max", &C::system, &C::System::n_max));
    f.push_back(number("system", "bus_floor", &C::system, &C::System::bus_floor));

    f.push_back(flag("ensemble", "enabled", &C::ensemble, &C::Ensemble::enabled));
    f.push_back(number("ensemble", "g_mean_mhz", &C::ensemble, &C::Ensemble::g_mean_mhz));
    f.push_back(number("ensemble", "g_sigma_mhz", &C::ensemble, &C::Ensemble::g_sigma_mhz));
    f.push_back(number("ensemble", "grid_min_mhz", &C::ensemble, &C::Ensemble::grid_min_mhz));
    f.push_back(number("ensemble", "grid_max_mhz", &C::ensemble, &C::Ensemble::grid_max_mhz));
    f.push_back(integer("ensemble", "grid_points", &C::ensemble, &C::Ensemble::grid_points));

    f.push_back(number("spectrum", "detuning_min_mhz", &C::spectrum,
                       &C::SpectrumScan::detuning_min_mhz));
    f.push_back(number("spectrum", "detuning_max_mhz", &C::spectrum,
                       &C::SpectrumScan::detuning_max_mhz));
    f.push_back(integer("spectrum", "detuning_points", &C::spectrum,
                        &C::SpectrumScan::detuning_points));
    f.push_back({"spectrum", "cases",
                 [](RunConfig& c, const std::string& v) {
                   c.spectrum.cases.clear();
                   std::stringstream ss(v);
                   std::string item;
                   while (std::getline(ss, item, ',')) {
                     item = trim(item);
                     if (!item.empty()) {
                       c.spectrum.cases.push_back(item);
                     }
                   }
                 },
                 [](const RunConfig& c) {
                   return fmt::format("{}", fmt::join(c.spectrum.cases, ","));
                 }});

    f.push_back(number("g2", "flux_per_us", &C::g2, &C::G2::flux_per_us));
    f.push_back(number("g2", "tau_max_us", &C::g2, &C::G2::tau_max_us));
    f.push_back(integer("g2", "tau_points", &C::g2, &C::G2::tau_points));
    f.push_back(flag("g2", "ensemble", &C::g2, &C::G2::ensemble));
    f.push_back(integer("g2", "n_max", &C::g2, &C::G2::n_max));

    f.push_back(number("sweep", "kappa_drop_min_mhz", &C::sweep, &C::Sweep::kappa_drop_min_mhz));
    f.push_back(number("sweep", "kappa_drop_max_mhz", &C::sweep, &C::Sweep::kappa_drop_max_mhz));
    f.push_back(integer("sweep", "points", &C::sweep, &C::Sweep::points));

    f.push_back({"fit", "data", [](RunConfig& c, const std::string& v) { c.fit.data = trim(v); },
                 [](const RunConfig& c) { return c.fit.data; }});
    f.push_back(number("fit", "synthetic_noise", &C::fit, &C::Fit::synthetic_noise));
    f.push_back(number("fit", "truth_g_mean_mhz", &C::fit, &C::Fit::truth_g_mean_mhz));
    f.push_back(number("fit", "truth_g_sigma_mhz", &C::fit, &C::Fit::truth_g_sigma_mhz));
    f.push_back(integer("fit", "restarts", &C::fit, &C::Fit::restarts));

    f.push_back(number("transit", "g_peak_mhz", &C::transit, &C::Transit::g_peak_mhz));
    f.push_back(optional_number("transit", "transit_sigma_us", "auto", &C::transit,
                                &C::Transit::transit_sigma_us));
    f.push_back(number("transit", "target_fwhm_us", &C::transit, &C::Transit::target_fwhm_us));
    f.push_back(number("transit", "flux_per_us", &C::transit, &C::Transit::flux_per_us));
    f.push_back(number("transit", "detection_efficiency", &C::transit,
                       &C::Transit::detection_efficiency));
    f.push_back(number("transit", "bus_floor", &C::transit, &C::Transit::bus_floor));
    f.push_back(number("transit", "timebin_us", &C::transit, &C::Transit::timebin_us));
    f.push_back(number("transit", "duration_us", &C::transit, &C::Transit::duration_us));
    f.push_back(integer("transit", "transits", &C::transit, &C::Transit::transits));

    f.push_back(integer("trigger", "threshold_counts", &C::trigger, &C::Trigger::threshold_counts));
    f.push_back(number("trigger", "window_us", &C::trigger, &C::Trigger::window_us));
    f.push_back(number("trigger", "latency_us", &C::trigger, &C::Trigger::latency_us));

    f.push_back(number("project", "q_improvement", &C::project, &C::Project::q_improvement));
    f.push_back(number("project", "g_mhz", &C::project, &C::Project::g_mhz));
    f.push_back(number("project", "g_sigma_mhz", &C::project, &C::Project::g_sigma_mhz));
    f.push_back(number("project", "kappa_drop_min_mhz", &C::project,
                       &C::Project::kappa_drop_min_mhz));
    f.push_back(number("project", "kappa_drop_max_mhz", &C::project,
                       &C::Project::kappa_drop_max_mhz));
    f.push_back(integer("project", "points", &C::project, &C::Project::points));

    f.push_back({"run", "out",
                 [](RunConfig& c, const std::string& v) { c.run.out = trim(v); },
                 [](const RunConfig& c) { return c.run.out.string(); }});
    f.push_back(integer("run", "seed", &C::run, &C::Run::seed));
    f.push_back(integer("run", "workers", &C::run, &C::Run::workers));
    return f;
  }();
  return table;
}

void check(bool ok, const std::string& message) {
  if (!ok) {
    throw ConfigError(message);
  }
}

}  // namespace

void RunConfig::validate() const {
  const auto& s = system;
  for (auto [v, name] : {std::pair{s.kappa_i_mhz, "system.kappa_i_mhz"},
                         std::pair{s.kappa_drop_mhz, "system.kappa_drop_mhz"},
                         std::pair{s.h_mhz, "system.h_mhz"},
                         std::pair{s.gamma_mhz, "system.gamma_mhz"},
                         std::pair{s.g_mhz, "system.g_mhz"},
                         std::pair{s.flux_per_us, "system.flux_per_us"}}) {
    check(v >= 0.0, std::string(name) + " must be >= 0");
  }
  check(!s.kappa_bus_mhz || *s.kappa_bus_mhz >= 0.0, "system.kappa_bus_mhz must be >= 0");
  check(s.n_max >= 1, "system.n_max must be >= 1");
  check(s.bus_floor >= 0.0 && s.bus_floor <= 1.0, "system.bus_floor must lie in [0, 1]");
  check(s.kappa_i_mhz + s.kappa_drop_mhz + s.kappa_bus_mhz.value_or(1.0) > 0.0,
        "total resonator decay must be > 0");

  if (ensemble.enabled) {
    check(ensemble.g_sigma_mhz > 0.0, "ensemble.g_sigma_mhz must be > 0");
    check(ensemble.grid_min_mhz >= 0.0 && ensemble.grid_min_mhz < ensemble.grid_max_mhz,
          "ensemble grid requires 0 <= grid_min_mhz < grid_max_mhz");
    check(ensemble.grid_points >= 2, "ensemble.grid_points must be >= 2");
  }
  check(spectrum.detuning_points >= 0, "spectrum.detuning_points must be >= 0");
  check(spectrum.detuning_points < 2 || spectrum.detuning_min_mhz < spectrum.detuning_max_mhz,
        "spectrum requires detuning_min_mhz < detuning_max_mhz");
  for (const std::string& c : spectrum.cases) {
    check(c == "single" || c == "ensemble" || c == "empty",
          "spectrum.cases entries must be single, ensemble or empty (got '" + c + "')");
  }
  check(g2.flux_per_us > 0.0, "g2.flux_per_us must be > 0");
  check(g2.n_max >= 1, "g2.n_max must be >= 1");
  check(g2.tau_max_us > 0.0 && g2.tau_points >= 2, "g2 needs tau_max_us > 0 and tau_points >= 2");
  check(sweep.points >= 1 && sweep.kappa_drop_min_mhz >= 0.0 &&
            sweep.kappa_drop_min_mhz <= sweep.kappa_drop_max_mhz,
        "sweep requires points >= 1 and 0 <= kappa_drop_min_mhz <= kappa_drop_max_mhz");
  check(fit.synthetic_noise >= 0.0, "fit.synthetic_noise must be >= 0");
  check(fit.truth_g_sigma_mhz >= 0.0 && fit.truth_g_mean_mhz >= 0.0,
        "fit truth values must be >= 0");
  check(fit.restarts >= 1, "fit.restarts must be >= 1");
  check(transit.g_peak_mhz >= 0.0, "transit.g_peak_mhz must be >= 0");
  check(!transit.transit_sigma_us || *transit.transit_sigma_us > 0.0,
        "transit.transit_sigma_us must be > 0");
  check(transit.target_fwhm_us > 0.0, "transit.target_fwhm_us must be > 0");
  check(transit.flux_per_us > 0.0, "transit.flux_per_us must be > 0");
  check(transit.detection_efficiency > 0.0 && transit.detection_efficiency <= 1.0,
        "transit.detection_efficiency must lie in (0, 1]");
  check(transit.bus_floor >= 0.0 && transit.bus_floor <= 1.0, "transit.bus_floor must lie in [0, 1]");
  check(transit.timebin_us > 0.0 && transit.duration_us >= transit.timebin_us,
        "transit requires 0 < timebin_us <= duration_us");
  check(transit.transits >= 1, "transit.transits must be >= 1");
  check(trigger.threshold_counts >= 1, "trigger.threshold_counts must be >= 1");
  check(trigger.window_us > 0.0 && trigger.latency_us >= 0.0,
        "trigger requires window_us > 0 and latency_us >= 0");
  check(project.q_improvement >= 1.0, "project.q_improvement must be >= 1");
  check(project.g_mhz > 0.0 && project.g_sigma_mhz >= 0.0,
        "project requires g_mhz > 0 and g_sigma_mhz >= 0");
  check(project.points >= 1 && project.kappa_drop_min_mhz >= 0.0 &&
            project.kappa_drop_min_mhz <= project.kappa_drop_max_mhz,
        "project scan requires points >= 1 and ordered kappa_drop bounds");
  check(run.workers >= 1, "run.workers must be >= 1");
}

std::string RunConfig::to_ini() const {
  std::string out;
  std::string current;
  for (const Field& f : fields()) {
    if (f.section != current) {
      out += (current.empty() ? "" : "\n") + fmt::format("[{}]\n", f.section);
      current = f.section;
    }
    out += fmt::format("{} = {}\n", f.key, f.get(*this));
  }
  return out;
}

RunConfig default_config() { return RunConfig{}; }

std::vector<std::string> preset_names() { return {"paper-fig3", "paper-fig4"}; }

RunConfig preset(const std::string& name) {
  RunConfig c = default_config();
  if (name == "paper-fig3") {
    return c;
  }
  if (name == "paper-fig4") {
    // Operating point quoted for the optimum resonator-fiber coupling.
    c.system.kappa_bus_mhz = 25.0;
    c.system.kappa_drop_mhz = 20.0;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::map<std::string, const Field*> index;
  for (const Field& f : fields()) {
    index[f.section + "." + f.key] = &f;
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside of a section");
    }
    for (const auto& [key, value] : body) {
      const auto it = index.find(section + "." + key);
      if (it == index.end()) {
        throw ConfigError("config: unknown key '" + section + "." + key + "'");
      }
      it->second->set(base, value.data());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

HilbertSpace config_space(const RunConfig& cfg) { return build_space(cfg.system.n_max); }

SystemParams config_system(const RunConfig& cfg) {
  const auto& s = cfg.system;
  SystemParams p;
  p.kappa_i = units::from_mhz(s.kappa_i_mhz);
  p.kappa_drop = units::from_mhz(s.kappa_drop_mhz);
  p.kappa_bus = s.kappa_bus_mhz ? units::from_mhz(*s.kappa_bus_mhz)
                                : analytics::critical_kappa_bus(
                                      {p.kappa_i, p.kappa_drop, units::from_mhz(s.h_mhz)});
  p.gamma = units::from_mhz(s.gamma_mhz);
  p.g = units::from_mhz(s.g_mhz);
  p.delta_rl = units::from_mhz(s.delta_rl_mhz);
  p.delta_al = units::from_mhz(s.delta_al_mhz);
  p.flux_in = s.flux_per_us;
  return p;
}

GDistribution config_distribution(const RunConfig& cfg) {
  const auto& e = cfg.ensemble;
  return {units::from_mhz(e.g_mean_mhz), units::from_mhz(e.g_sigma_mhz),
          units::from_mhz(e.grid_min_mhz), units::from_mhz(e.grid_max_mhz), e.grid_points};
}

std::vector<double> config_detunings(const RunConfig& cfg) {
  const auto& s = cfg.spectrum;
  std::vector<double> grid(static_cast<std::size_t>(s.detuning_points));
  if (s.detuning_points == 1) {
    grid[0] = s.detuning_min_mhz;
  }
  for (int i = 0; s.detuning_points > 1 && i < s.detuning_points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        s.detuning_min_mhz + (s.detuning_max_mhz - s.detuning_min_mhz) * i / (s.detuning_points - 1);
  }
  return grid;
}

transit::TransitConfig config_transit(const RunConfig& cfg) {
  const auto& t = cfg.transit;
  transit::TransitConfig c;
  c.g_peak = units::from_mhz(t.g_peak_mhz);
  c.transit_sigma = t.transit_sigma_us.value_or(1.0);
  c.flux_in = t.flux_per_us;
  c.detection_efficiency = t.detection_efficiency;
  c.timebin = t.timebin_us;
  c.duration = t.duration_us;
  c.bus_floor = t.bus_floor;
  c.rng_seed = cfg.run.seed;
  return c;
}

transit::TriggerConfig config_trigger(const RunConfig& cfg) {
  return {cfg.trigger.threshold_counts, cfg.trigger.window_us, cfg.trigger.latency_us};
}

}  // namespace atomswitch
