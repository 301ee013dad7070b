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

#include "atomswitch/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace atomswitch::analytics {
namespace {

void require_rates(double kappa_i, double kappa_bus, double kappa_drop) {
  if (kappa_i < 0.0 || kappa_bus < 0.0 || kappa_drop < 0.0) {
    throw std::invalid_argument("coupling rates must be >= 0");
  }
  if (kappa_i + kappa_bus + kappa_drop <= 0.0) {
    throw std::invalid_argument("total resonator decay rate must be > 0");
  }
}

}  // namespace

double critical_kappa_bus(const CouplerConfig& cfg) {
  if (cfg.kappa_i < 0.0 || cfg.kappa_drop < 0.0 || cfg.h < 0.0) {
    throw std::invalid_argument("coupler rates must be >= 0");
  }
  return std::hypot(cfg.kappa_i + cfg.kappa_drop, cfg.h);
}

PortAmplitudes empty_cavity_response(double kappa_i, double kappa_bus, double kappa_drop,
                                     double delta) {
  require_rates(kappa_i, kappa_bus, kappa_drop);
  const cplx denom{kappa_i + kappa_bus + kappa_drop, delta};
  return {1.0 - 2.0 * kappa_bus / denom, 2.0 * std::sqrt(kappa_bus * kappa_drop) / denom};
}

PortAmplitudes weak_drive_response(double kappa_i, double kappa_bus, double kappa_drop,
                                   double gamma, double g, double delta_rl, double delta_al) {
  require_rates(kappa_i, kappa_bus, kappa_drop);
  if (gamma < 0.0 || g < 0.0) {
    throw std::invalid_argument("gamma and g must be >= 0");
  }
  cplx denom{kappa_i + kappa_bus + kappa_drop, delta_rl};
  if (g > 0.0) {
    const cplx atom{gamma, delta_al};
    if (atom == cplx{0.0, 0.0}) {
      throw std::invalid_argument("weak-drive response diverges for gamma = delta_al = 0 with g > 0");
    }
    denom += g * g / atom;
  }
  return {1.0 - 2.0 * kappa_bus / denom, 2.0 * std::sqrt(kappa_bus * kappa_drop) / denom};
}

double critical_atom_number(double kappa, double gamma, double g) {
  if (!(g > 0.0)) {
    throw std::invalid_argument("critical atom number requires g > 0");
  }
  return 2.0 * kappa * gamma / (g * g);
}

double cooperativity(double kappa, double gamma, double g) {
  if (!(kappa > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("cooperativity requires kappa > 0 and gamma > 0");
  }
  return g * g / (kappa * gamma);
}

double lorentzian(const LorentzianShape& shape, double delta) {
  const double w2 = shape.half_width * shape.half_width;
  const double x = delta - shape.center;
  return shape.offset + shape.amplitude * w2 / (x * x + w2);
}

}  // namespace atomswitch::analytics
