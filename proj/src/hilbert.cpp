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

#include "atomswitch/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace atomswitch {
namespace {

void require_square(const OperatorMatrix& op, const char* what) {
  if (op.rows() != op.cols()) {
    throw std::invalid_argument(std::string(what) + ": operator is not square");
  }
}

}  // namespace

int HilbertSpace::index(int photons, AtomLevel level) const {
  if (photons < 0 || photons > n_max_) {
    throw std::invalid_argument("photon number outside truncated space");
  }
  return photons * 2 + static_cast<int>(level);
}

HilbertSpace build_space(int n_max) {
  if (n_max < 1) {
    throw std::invalid_argument("n_max must be >= 1, got " + std::to_string(n_max));
  }
  return HilbertSpace(n_max);
}

OperatorMatrix annihilation(const HilbertSpace& space) {
  OperatorMatrix a = OperatorMatrix::Zero(space.dim(), space.dim());
  for (int n = 1; n <= space.n_max(); ++n) {
    const double amp = std::sqrt(static_cast<double>(n));
    for (AtomLevel s : {AtomLevel::Ground, AtomLevel::Excited}) {
      a(space.index(n - 1, s), space.index(n, s)) = amp;
    }
  }
  return a;
}

OperatorMatrix atom_lowering(const HilbertSpace& space) {
  OperatorMatrix sm = OperatorMatrix::Zero(space.dim(), space.dim());
  for (int n = 0; n <= space.n_max(); ++n) {
    sm(space.index(n, AtomLevel::Ground), space.index(n, AtomLevel::Excited)) = 1.0;
  }
  return sm;
}

OperatorMatrix number_operator(const HilbertSpace& space) {
  OperatorMatrix num = OperatorMatrix::Zero(space.dim(), space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    num(i, i) = static_cast<double>(space.photons(i));
  }
  return num;
}

OperatorMatrix identity(const HilbertSpace& space) {
  return OperatorMatrix::Identity(space.dim(), space.dim());
}

OperatorMatrix projector(const HilbertSpace& space, int photons, AtomLevel level) {
  OperatorMatrix p = OperatorMatrix::Zero(space.dim(), space.dim());
  const int i = space.index(photons, level);
  p(i, i) = 1.0;
  return p;
}

OperatorMatrix adjoint(const OperatorMatrix& op) { return op.adjoint(); }

OperatorMatrix product(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw std::invalid_argument("product: inner dimensions differ");
  }
  return lhs * rhs;
}

cplx trace(const OperatorMatrix& op) {
  require_square(op, "trace");
  return op.trace();
}

cplx expectation(const OperatorMatrix& op, const OperatorMatrix& rho) {
  require_square(op, "expectation");
  require_square(rho, "expectation");
  if (op.rows() != rho.rows()) {
    throw std::invalid_argument("expectation: operator and state dimensions differ");
  }
  // Tr[op rho] = sum_ij op_ij rho_ji
  return (op.array() * rho.transpose().array()).sum();
}

DensityDiagnostics diagnose_density(const OperatorMatrix& rho) {
  require_square(rho, "density matrix");
  DensityDiagnostics d{};
  d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(rho.trace() - 1.0);
  const OperatorMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

DensityMatrix::DensityMatrix(OperatorMatrix rho)
    : rho_(std::move(rho)), diagnostics_(diagnose_density(rho_)) {
  if (diagnostics_.hermiticity_error > kHermiticityTolerance) {
    throw std::invalid_argument("density matrix is not Hermitian (deviation " +
                                std::to_string(diagnostics_.hermiticity_error) + ")");
  }
  if (diagnostics_.trace_error > kTraceTolerance) {
    throw std::invalid_argument("density matrix trace differs from 1 by " +
                                std::to_string(diagnostics_.trace_error));
  }
  if (diagnostics_.min_eigenvalue < kEigenvalueFloor) {
    throw std::invalid_argument("density matrix has negative eigenvalue " +
                                std::to_string(diagnostics_.min_eigenvalue));
  }
}

}  // namespace atomswitch
