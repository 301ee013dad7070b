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

// Truncated Hilbert space of one traveling-wave resonator mode coupled to a
// two-level atom, and the dense operator algebra on it.
//
// Basis ordering: index = photon_number * 2 + atom_level, with
// atom_level 0 = ground and 1 = excited. The mode factor is the slow index,
// so operators are kron(mode_op, atom_op).

#include <Eigen/Dense>
#include <complex>

namespace atomswitch {

using cplx = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;

enum class AtomLevel : int { Ground = 0, Excited = 1 };

class HilbertSpace {
 public:
  int n_max() const { return n_max_; }
  int dim_mode() const { return n_max_ + 1; }
  static constexpr int dim_atom() { return 2; }
  int dim() const { return 2 * (n_max_ + 1); }

  int index(int photons, AtomLevel level) const;
  int photons(int index) const { return index / 2; }
  AtomLevel level(int index) const { return static_cast<AtomLevel>(index % 2); }

  bool operator==(const HilbertSpace&) const = default;

 private:
  friend HilbertSpace build_space(int n_max);
  explicit HilbertSpace(int n_max) : n_max_(n_max) {}
  int n_max_;
};

// Throws std::invalid_argument for n_max < 1.
HilbertSpace build_space(int n_max);

OperatorMatrix annihilation(const HilbertSpace& space);
OperatorMatrix atom_lowering(const HilbertSpace& space);
OperatorMatrix number_operator(const HilbertSpace& space);
OperatorMatrix identity(const HilbertSpace& space);
// |n, level><n, level|
OperatorMatrix projector(const HilbertSpace& space, int photons, AtomLevel level);

OperatorMatrix adjoint(const OperatorMatrix& op);
OperatorMatrix product(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
cplx trace(const OperatorMatrix& op);
// Tr[op rho]
cplx expectation(const OperatorMatrix& op, const OperatorMatrix& rho);

struct DensityDiagnostics {
  double hermiticity_error;  // max |rho - rho^dagger|
  double trace_error;        // |Tr rho - 1|
  double min_eigenvalue;
};

DensityDiagnostics diagnose_density(const OperatorMatrix& rho);

inline constexpr double kHermiticityTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kEigenvalueFloor = -1e-8;

// Hermitian, unit-trace, numerically positive semidefinite state.
class DensityMatrix {
 public:
  // Throws std::invalid_argument when any invariant is violated.
  explicit DensityMatrix(OperatorMatrix rho);

  const OperatorMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }
  const DensityDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  OperatorMatrix rho_;
  DensityDiagnostics diagnostics_;
};

}  // namespace atomswitch
