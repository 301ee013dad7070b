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

#include <stdexcept>
#include <string>

namespace atomswitch {

// Precondition violations raise std::invalid_argument. Failures of the
// numerical machinery on otherwise valid input derive from NumericalError.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The trace-constrained Liouvillian system has more than one solution.
class SolverDegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The highest retained Fock level carries too much population.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Adaptive step size shrank below the representable resolution.
class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Mean output flux is zero, so g2 has no normalization.
class UndefinedCorrelationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace atomswitch
