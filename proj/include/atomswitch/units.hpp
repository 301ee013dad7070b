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

#include <numbers>

// Internally every rate is an angular frequency in rad/us and every time is
// in us. User-facing values are ordinary frequencies nu = omega / 2pi in MHz.
namespace atomswitch::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double from_mhz(double nu_mhz) { return kTwoPi * nu_mhz; }
constexpr double to_mhz(double omega) { return omega / kTwoPi; }

}  // namespace atomswitch::units
