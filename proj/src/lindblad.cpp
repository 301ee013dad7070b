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

#include "atomswitch/lindblad.hpp"

#include <algorithm>
#include <initializer_list>
#include <utility>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "atomswitch/errors.hpp"
#include "atomswitch/kernels.hpp"
#include "atomswitch/parallel.hpp"
#include "atomswitch/units.hpp"

namespace atomswitch {
namespace {

constexpr cplx kI{0.0, 1.0};

using Mat = Eigen::MatrixXcd;

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// D[c] rho = c rho c^dag - 1/2 {c^dag c, rho}, column-stacked.
Mat dissipator(const OperatorMatrix& c) {
  const Mat id = Mat::Identity(c.rows(), c.cols());
  const Mat cdc = c.adjoint() * c;
  return kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id);
}

template <typename Error>
[[noreturn]] void rethrow_at(const Error& e, std::size_t index) {
  throw Error(std::string(e.what()) + " (grid index " + std::to_string(index) + ")");
}

void require_finite_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
  }
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Integrates dy/dt = L y with a single continuous adaptive trajectory.
class DopriIntegrator {
 public:
  DopriIntegrator(const Liouvillian& liouvillian, std::vector<cplx> y0,
                  const PropagateOptions& options)
      : l_(liouvillian), opts_(options), y_(std::move(y0)) {
    const std::size_t n = y_.size();
    for (auto* buf : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_, &err_}) {
      buf->assign(n, cplx{});
    }
    double ymax = 0.0;
    for (const cplx& v : y_) {
      ymax = std::max(ymax, std::abs(v));
    }
    atol_ = opts_.atol >= 0.0 ? opts_.atol : 1e-12 * ymax;
    if (atol_ == 0.0) {
      atol_ = std::numeric_limits<double>::min();
    }
    l_.apply(y_, k1_);
    double dmax = 0.0;
    for (const cplx& v : k1_) {
      dmax = std::max(dmax, std::abs(v));
    }
    h_ = dmax > 0.0 ? 0.01 * std::max(ymax, atol_) / dmax : std::numeric_limits<double>::infinity();
  }

  const std::vector<cplx>& state() const { return y_; }

  // Advances to the absolute time `target` >= current time.
  void advance_to(double target) {
    while (t_ < target) {
      const double remaining = target - t_;
      double h = std::min(h_, remaining);
      const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(target, 1e-300);
      for (;;) {
        if (++steps_ > opts_.max_steps) {
          throw IntegrationError("propagate: step budget exhausted");
        }
        if (h < h_floor) {
          throw IntegrationError("propagate: step size underflow at t = " + std::to_string(t_));
        }
        const double err = attempt(h);
        if (err <= 1.0) {
          t_ = (h == remaining) ? target : t_ + h;
          y_.swap(ynew_);
          k1_.swap(k7_);
          const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
          // A step clipped to the target is not representative of the control.
          if (h < remaining || h >= h_) {
            h_ = h * grow;
          }
          break;
        }
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        h_ = h;
      }
    }
  }

 private:
  void stage(std::vector<cplx>& out_k, double h, std::initializer_list<std::pair<double, const std::vector<cplx>*>> terms) {
    tmp_ = y_;
    for (const auto& [coef, k] : terms) {
      if (coef != 0.0) {
        kernels::axpy(h * coef, *k, tmp_);
      }
    }
    l_.apply(tmp_, out_k);
  }

  double attempt(double h) {
    stage(k2_, h, {{a21, &k1_}});
    stage(k3_, h, {{a31, &k1_}, {a32, &k2_}});
    stage(k4_, h, {{a41, &k1_}, {a42, &k2_}, {a43, &k3_}});
    stage(k5_, h, {{a51, &k1_}, {a52, &k2_}, {a53, &k3_}, {a54, &k4_}});
    stage(k6_, h, {{a61, &k1_}, {a62, &k2_}, {a63, &k3_}, {a64, &k4_}, {a65, &k5_}});
    ynew_ = y_;
    for (const auto& [coef, k] : {std::pair{a71, &k1_}, std::pair{a73, &k3_}, std::pair{a74, &k4_},
                                  std::pair{a75, &k5_}, std::pair{a76, &k6_}}) {
      kernels::axpy(h * coef, *k, ynew_);
    }
    l_.apply(ynew_, k7_);
    std::fill(err_.begin(), err_.end(), cplx{});
    for (const auto& [coef, k] :
         {std::pair{e1, &k1_}, std::pair{e3, &k3_}, std::pair{e4, &k4_}, std::pair{e5, &k5_},
          std::pair{e6, &k6_}, std::pair{e7, &k7_}}) {
      kernels::axpy(h * coef, *k, err_);
    }
    const double err = kernels::scaled_error(err_, y_, ynew_, atol_, opts_.rtol);
    return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  }

  const Liouvillian& l_;
  PropagateOptions opts_;
  std::vector<cplx> y_;
  std::vector<cplx> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, err_;
  double atol_ = 0.0;
  double h_ = 0.0;
  double t_ = 0.0;
  long steps_ = 0;
};

std::vector<cplx> to_std(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

OperatorMatrix from_std(const std::vector<cplx>& v, Eigen::Index dim) {
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
}

}  // namespace

double SystemParams::drive_amplitude() const { return std::sqrt(2.0 * kappa_bus * flux_in); }

void SystemParams::validate() const {
  require_finite_nonnegative(kappa_i, "kappa_i");
  require_finite_nonnegative(kappa_bus, "kappa_bus");
  require_finite_nonnegative(kappa_drop, "kappa_drop");
  require_finite_nonnegative(gamma, "gamma");
  require_finite_nonnegative(g, "g");
  require_finite_nonnegative(flux_in, "flux_in");
  if (!std::isfinite(delta_rl) || !std::isfinite(delta_al)) {
    throw std::invalid_argument("detunings must be finite");
  }
}

Liouvillian::Liouvillian(HilbertSpace space, Eigen::MatrixXcd generator)
    : space_(space), generator_(std::move(generator)) {
  const Eigen::Index n = static_cast<Eigen::Index>(space_.dim()) * space_.dim();
  if (generator_.rows() != n || generator_.cols() != n) {
    throw std::invalid_argument("Liouvillian size does not match the Hilbert space");
  }
  row_major_.resize(static_cast<std::size_t>(n * n));
  Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      row_major_.data(), n, n) = generator_;
}

void Liouvillian::apply(std::span<const cplx> x, std::span<cplx> y) const {
  const auto n = static_cast<std::size_t>(generator_.rows());
  kernels::matvec(row_major_, n, n, x, y);
}

double Liouvillian::trace_row_residual() const {
  const int d = space_.dim();
  Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(generator_.cols());
  for (int i = 0; i < d; ++i) {
    row += generator_.row(static_cast<Eigen::Index>(i) * d + i);
  }
  return row.cwiseAbs().maxCoeff();
}

Eigen::VectorXcd vectorize(const OperatorMatrix& op) {
  return Eigen::Map<const Eigen::VectorXcd>(op.data(), op.size());
}

OperatorMatrix unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim) {
  if (v.size() != dim * dim) {
    throw std::invalid_argument("unvectorize: length is not dim^2");
  }
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
}

OperatorMatrix build_hamiltonian(const HilbertSpace& space, const SystemParams& params) {
  params.validate();
  const OperatorMatrix a = annihilation(space);
  const OperatorMatrix sm = atom_lowering(space);
  const OperatorMatrix ad = a.adjoint();
  const OperatorMatrix sp = sm.adjoint();
  const double eta = params.drive_amplitude();
  OperatorMatrix h = params.delta_rl * (ad * a) + params.delta_al * (sp * sm) +
                     params.g * (ad * sm + a * sp) + kI * eta * (ad - a);
  return h;
}

Liouvillian build_liouvillian(const HilbertSpace& space, const SystemParams& params) {
  const OperatorMatrix h = build_hamiltonian(space, params);
  const OperatorMatrix a = annihilation(space);
  const OperatorMatrix sm = atom_lowering(space);
  const Mat id = Mat::Identity(space.dim(), space.dim());

  Mat l = -kI * (kron(id, h) - kron(h.transpose(), id));
  // Three couplers share the jump operator a, so their dissipators add to
  // that of sqrt(2 kappa) a.
  if (params.kappa() > 0.0) {
    l += dissipator(std::sqrt(2.0 * params.kappa()) * a);
  }
  if (params.gamma > 0.0) {
    l += dissipator(std::sqrt(2.0 * params.gamma) * sm);
  }
  return Liouvillian(space, std::move(l));
}

double truncation_population(const HilbertSpace& space, const OperatorMatrix& rho) {
  const int n = space.n_max();
  return std::abs(rho(space.index(n, AtomLevel::Ground), space.index(n, AtomLevel::Ground))) +
         std::abs(rho(space.index(n, AtomLevel::Excited), space.index(n, AtomLevel::Excited)));
}

DensityMatrix steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& options) {
  const HilbertSpace& space = liouvillian.space();
  const int d = space.dim();
  const Eigen::Index n = liouvillian.size();

  // Replace the first equation by the trace constraint Tr rho = 1.
  Mat system = liouvillian.matrix();
  system.row(0).setZero();
  for (int i = 0; i < d; ++i) {
    system(0, static_cast<Eigen::Index>(i) * d + i) = 1.0;
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(0) = 1.0;

  const Eigen::PartialPivLU<Mat> lu(system);
  // The rcond estimate skips exactly zero pivots, so check them directly.
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = std::min(lu.rcond(), pivots.minCoeff() / pivots.maxCoeff());
  if (!(rcond > 1e2 * std::numeric_limits<double>::epsilon())) {
    throw SolverDegenerateError("steady state is not unique (reciprocal condition " +
                                std::to_string(rcond) + ")");
  }
  Eigen::VectorXcd x = lu.solve(rhs);
  if (!x.allFinite()) {
    throw SolverDegenerateError("steady-state solve produced non-finite values");
  }

  OperatorMatrix rho = unvectorize(x, d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();

  const Eigen::VectorXcd residual_vec = liouvillian.matrix() * vectorize(rho);
  const double residual = residual_vec.cwiseAbs().maxCoeff();
  if (residual > options.residual_tolerance) {
    throw SolverDegenerateError("steady-state residual " + std::to_string(residual) +
                                " exceeds tolerance");
  }
  const double top = truncation_population(space, rho);
  if (top > options.truncation_tolerance) {
    throw TruncationError("population " + std::to_string(top) + " in Fock level n_max = " +
                          std::to_string(space.n_max()) + "; increase n_max");
  }
  try {
    return DensityMatrix(std::move(rho));
  } catch (const std::invalid_argument& e) {
    throw NumericalError(std::string("steady state violates state invariants: ") + e.what());
  }
}

OperatorMatrix propagate(const Liouvillian& liouvillian, const OperatorMatrix& rho0, double tau,
                         const PropagateOptions& options) {
  const double taus[] = {tau};
  return propagate_grid(liouvillian, rho0, taus, options).front();
}

std::vector<OperatorMatrix> propagate_grid(const Liouvillian& liouvillian,
                                           const OperatorMatrix& rho0, std::span<const double> taus,
                                           const PropagateOptions& options) {
  const Eigen::Index d = liouvillian.space().dim();
  if (rho0.rows() != d || rho0.cols() != d) {
    throw std::invalid_argument("propagate: operator dimension does not match the Liouvillian");
  }
  for (std::size_t k = 0; k < taus.size(); ++k) {
    if (!std::isfinite(taus[k]) || taus[k] < 0.0 || (k > 0 && taus[k] < taus[k - 1])) {
      throw std::invalid_argument("propagate: delays must be finite, >= 0 and ascending");
    }
  }
  DopriIntegrator integrator(liouvillian, to_std(vectorize(rho0)), options);
  std::vector<OperatorMatrix> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    integrator.advance_to(tau);
    out.push_back(from_std(integrator.state(), d));
  }
  return out;
}

OperatorMatrix output_operator(const HilbertSpace& space, const SystemParams& params, Port port) {
  const OperatorMatrix a = annihilation(space);
  if (port == Port::Drop) {
    return std::sqrt(2.0 * params.kappa_drop) * a;
  }
  return std::sqrt(params.flux_in) * identity(space) - std::sqrt(2.0 * params.kappa_bus) * a;
}

Transmissions transmissions(const HilbertSpace& space, const SystemParams& params,
                            const OperatorMatrix& rho_ss) {
  if (!(params.flux_in > 0.0)) {
    throw std::invalid_argument("transmissions require flux_in > 0");
  }
  const OperatorMatrix a = annihilation(space);
  const OperatorMatrix sm = atom_lowering(space);
  const double photons = expectation(a.adjoint() * a, rho_ss).real();
  const double excited = expectation(sm.adjoint() * sm, rho_ss).real();
  const OperatorMatrix b = output_operator(space, params, Port::Bus);
  Transmissions t;
  t.t_bus = expectation(b.adjoint() * b, rho_ss).real() / params.flux_in;
  t.t_drop = 2.0 * params.kappa_drop * photons / params.flux_in;
  t.loss = (2.0 * params.kappa_i * photons + 2.0 * params.gamma * excited) / params.flux_in;
  return t;
}

Transmissions transmissions(const HilbertSpace& space, const SystemParams& params,
                            const SteadyStateOptions& options) {
  params.validate();
  if (!(params.flux_in > 0.0)) {
    throw std::invalid_argument("transmissions require flux_in > 0");
  }
  const DensityMatrix rho = steady_state(build_liouvillian(space, params), options);
  return transmissions(space, params, rho.matrix());
}

Spectrum spectrum(const HilbertSpace& space, const SystemParams& params,
                  std::span<const double> detuning_mhz, unsigned workers,
                  const SteadyStateOptions& options) {
  params.validate();
  for (double d : detuning_mhz) {
    if (!std::isfinite(d)) {
      throw std::invalid_argument("spectrum: detuning grid must be finite");
    }
  }
  Spectrum s;
  s.detuning_mhz.assign(detuning_mhz.begin(), detuning_mhz.end());
  s.t_bus.resize(s.size());
  s.t_drop.resize(s.size());
  s.loss.resize(s.size());
  parallel_for(s.size(), workers, [&](std::size_t i) {
    SystemParams p = params;
    p.delta_rl = units::from_mhz(s.detuning_mhz[i]);
    p.delta_al = p.delta_rl;
    try {
      const Transmissions t = transmissions(space, p, options);
      s.t_bus[i] = t.t_bus;
      s.t_drop[i] = t.t_drop;
      s.loss[i] = t.loss;
    } catch (const TruncationError& e) {
      rethrow_at(e, i);
    } catch (const SolverDegenerateError& e) {
      rethrow_at(e, i);
    } catch (const NumericalError& e) {
      rethrow_at(e, i);
    }
  });
  return s;
}

Correlation intensity_correlation(const HilbertSpace& space, const SystemParams& params, Port port,
                                  std::span<const double> tau_us,
                                  const SteadyStateOptions& options,
                                  const PropagateOptions& propagate_options) {
  const Liouvillian l = build_liouvillian(space, params);
  const DensityMatrix rho = steady_state(l, options);
  const OperatorMatrix b = output_operator(space, params, port);
  const OperatorMatrix bdb = b.adjoint() * b;

  Correlation c;
  c.port = port;
  c.tau_us.assign(tau_us.begin(), tau_us.end());
  c.mean_flux = expectation(bdb, rho.matrix()).real();

  const OperatorMatrix seed = b * rho.matrix() * b.adjoint();
  const std::vector<OperatorMatrix> evolved = propagate_grid(l, seed, tau_us, propagate_options);
  // Tr[O X] = sum_ij O_ij X_ji = dotu(vec(O^T), vec(X))
  const Eigen::VectorXcd observable = vectorize(bdb.transpose());
  c.numerator.reserve(evolved.size());
  for (const OperatorMatrix& x : evolved) {
    const Eigen::VectorXcd vx = vectorize(x);
    c.numerator.push_back(
        kernels::dotu({observable.data(), static_cast<std::size_t>(observable.size())},
                      {vx.data(), static_cast<std::size_t>(vx.size())})
            .real());
  }
  return c;
}

G2Curve g2_curve(const HilbertSpace& space, const SystemParams& params, Port port,
                 std::span<const double> tau_us, const SteadyStateOptions& options,
                 const PropagateOptions& propagate_options) {
  const Correlation c =
      intensity_correlation(space, params, port, tau_us, options, propagate_options);
  const double denom = c.mean_flux * c.mean_flux;
  if (!(denom >= kMinCorrelationFlux)) {
    throw UndefinedCorrelationError("mean output flux vanishes; g2 is undefined");
  }
  G2Curve curve;
  curve.port = port;
  curve.tau_us = c.tau_us;
  curve.values.reserve(c.numerator.size());
  for (double v : c.numerator) {
    curve.values.push_back(v / denom);
  }
  return curve;
}

}  // namespace atomswitch
