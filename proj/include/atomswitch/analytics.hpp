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

// Closed-form coupled-mode and weak-drive results for the add-drop resonator.
// These serve as independent checks on the master-equation engine; the
// backscattering rate h enters only the critical-coupling condition.

#include <complex>

namespace atomswitch::analytics {

using cplx = std::complex<double>;

struct CouplerConfig {
  double kappa_i = 0.0;
  double kappa_drop = 0.0;
  double h = 0.0;  // backscattering rate
};

struct LorentzianShape {
  double center = 0.0;
  double half_width = 1.0;
  double amplitude = 0.0;
  double offset = 0.0;
};

// Field amplitude transmissions into the two output fibers.
struct PortAmplitudes {
  cplx bus;
  cplx drop;

  double bus_power() const { return std::norm(bus); }
  double drop_power() const { return std::norm(drop); }
};

// sqrt((kappa_i + kappa_drop)^2 + h^2)
double critical_kappa_bus(const CouplerConfig& cfg);

PortAmplitudes empty_cavity_response(double kappa_i, double kappa_bus, double kappa_drop,
                                     double delta);

// Single-excitation limit of the driven Jaynes-Cummings system:
//   t_bus  = 1 - 2 kappa_bus / D,  t_drop = 2 sqrt(kappa_bus kappa_drop) / D,
//   D = kappa + i delta_rl + g^2 / (gamma + i delta_al).
PortAmplitudes weak_drive_response(double kappa_i, double kappa_bus, double kappa_drop,
                                   double gamma, double g, double delta_rl, double delta_al);

// N0 = 2 kappa gamma / g^2
double critical_atom_number(double kappa, double gamma, double g);

// g^2 / (kappa gamma) = 2 / N0
double cooperativity(double kappa, double gamma, double g);

double lorentzian(const LorentzianShape& shape, double delta);

}  // namespace atomswitch::analytics
