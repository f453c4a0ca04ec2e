#pragma once

#include <Eigen/SVD>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aqm/lindblad.hpp"

namespace aqm::dynamics {

struct EvolveOptions {
  // Emit every stride-th state (the final state is always emitted).
  int snapshot_stride = 1;
  // dt * spectral_scale <= 0.1: error in strict mode, warning otherwise.
  bool strict_step_check = true;
  // Emitted-state validation thresholds. Trace renormalization is never
  // applied; drift beyond trace_tol aborts the run.
  double trace_tol = 1e-7;
  double positivity_tol = 1e-7;
  double hermiticity_tol = 1e-10;
  bool validate_states = true;
  // Post-hoc step-halving check: rerun at dt/2 and require the final
  // states to agree entrywise.
  bool convergence_check = false;
  double convergence_tol = 1e-6;
};

struct TimedState {
  double t;
  DensityMatrix state;
};

struct EvolveResult {
  std::vector<TimedState> states;
  std::vector<std::string> warnings;
  std::optional<double> convergence_error;

  const DensityMatrix& final_state() const { return states.back().state; }
};

namespace detail {

inline Matrix rk4_step(const LindbladModel& model, const Matrix& rho,
                       double dt) {
  Matrix k1 = model.apply_generator(rho);
  Matrix k2 = model.apply_generator(rho + (0.5 * dt) * k1);
  Matrix k3 = model.apply_generator(rho + (0.5 * dt) * k2);
  Matrix k4 = model.apply_generator(rho + dt * k3);
  return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline Matrix integrate_plain(const LindbladModel& model, Matrix rho,
                              double t_final, long n_steps) {
  const double dt = t_final / double(n_steps);
  for (long s = 0; s < n_steps; ++s) rho = rk4_step(model, rho, dt);
  return rho;
}

}  // namespace detail

// Fixed-step RK4 integration of the master equation. The step actually
// used is t_final / ceil(t_final/dt) so the series lands exactly on
// t_final.
inline EvolveResult evolve(const LindbladModel& model,
                           const DensityMatrix& rho0, double t_final,
                           double dt, const EvolveOptions& options = {}) {
  if (rho0.space() != model.space()) {
    throw DimensionError("evolve: initial state on wrong space");
  }
  if (!(dt > 0.0) || !(t_final > 0.0)) {
    throw InvalidArgumentError("evolve: dt and t_final must be > 0");
  }

  EvolveResult result;
  const double scale = spectral_scale(model);
  if (dt * scale > 0.1) {
    const std::string msg = "evolve: dt * spectral_scale = " +
                            std::to_string(dt * scale) + " exceeds 0.1";
    if (options.strict_step_check) throw SolverError(msg);
    result.warnings.push_back(msg);
  }

  const long n_steps = std::max<long>(1, long(std::ceil(t_final / dt - 1e-12)));
  const double step = t_final / double(n_steps);
  const StateTolerances tol{options.hermiticity_tol, options.trace_tol,
                            options.positivity_tol};

  auto emit = [&](double t, const Matrix& m) {
    if (options.validate_states) {
      try {
        result.states.push_back({t, DensityMatrix(model.space(), m, tol)});
      } catch (const InvariantError& e) {
        throw InvariantError("evolve: state invariant violated at t = " +
                             std::to_string(t) + ": " + e.what());
      }
    } else {
      StateTolerances loose{1e300, 1e300, 1e300};
      result.states.push_back({t, DensityMatrix(model.space(), m, loose)});
    }
  };

  Matrix rho = rho0.matrix();
  emit(0.0, rho);
  for (long s = 1; s <= n_steps; ++s) {
    rho = detail::rk4_step(model, rho, step);
    const double t = double(s) * step;
    const double drift = std::abs(rho.trace() - Complex(1.0));
    if (drift > options.trace_tol) {
      throw InvariantError("evolve: trace drift " + std::to_string(drift) +
                           " at t = " + std::to_string(t));
    }
    if (s % options.snapshot_stride == 0 || s == n_steps) emit(t, rho);
  }

  if (options.convergence_check) {
    Matrix halved =
        detail::integrate_plain(model, rho0.matrix(), t_final, 2 * n_steps);
    const double err = (halved - rho).cwiseAbs().maxCoeff();
    result.convergence_error = err;
    if (err > options.convergence_tol) {
      throw SolverError("evolve: step-halving error " + std::to_string(err) +
                        " exceeds " + std::to_string(options.convergence_tol));
    }
  }
  return result;
}

// Vectorized generator acting on column-stacked rho:
// vec(A rho B) = (B^T (x) A) vec(rho).
inline Matrix superoperator_matrix(const LindbladModel& model) {
  const int d = model.space().total_dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix& h = model.hamiltonian().matrix();
  Matrix s = Complex(0, -1) * (Eigen::kroneckerProduct(id, h).eval() -
                               Eigen::kroneckerProduct(h.transpose(), id).eval());
  for (std::size_t c = 0; c < model.channels().size(); ++c) {
    const auto& ch = model.channels()[c];
    if (ch.rate == 0.0) continue;
    const Matrix& l = ch.op.matrix();
    const Matrix& ll = model.ldag_l(c);
    s.noalias() +=
        ch.rate * Eigen::kroneckerProduct(l.conjugate(), l).eval();
    s.noalias() -=
        (0.5 * ch.rate) * Eigen::kroneckerProduct(id, ll).eval();
    s.noalias() -=
        (0.5 * ch.rate) * Eigen::kroneckerProduct(ll.transpose(), id).eval();
  }
  return s;
}

struct SteadyStateOptions {
  double degeneracy_ratio = 1e-8;  // sigma_{n-2} must exceed ratio * sigma_0
  double residual_tol = 1e-10;     // max |L(rho_ss)| entrywise
};

// Unique steady state from the SVD of the vectorized generator: the
// smallest singular vector, Hermitized and trace-normalized.
inline DensityMatrix steady_state(const LindbladModel& model,
                                  const SteadyStateOptions& options = {}) {
  const int d = model.space().total_dim();
  const Matrix s = superoperator_matrix(model);
  Eigen::BDCSVD<Matrix> svd(s, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int n = int(sv.size());

  const double threshold = options.degeneracy_ratio * sv(0);
  int null_dim = 0;
  for (int i = 0; i < n; ++i) {
    if (sv(i) <= threshold) ++null_dim;
  }
  if (null_dim != 1) {
    throw SolverError("steady_state: generator null space has dimension " +
                      std::to_string(null_dim) + " (need exactly 1)");
  }

  Vector v = svd.matrixV().col(n - 1);
  Matrix x = Eigen::Map<Matrix>(v.data(), d, d);
  const Complex tr = x.trace();
  if (std::abs(tr) < 1e-10 * x.norm()) {
    throw SolverError("steady_state: null vector is traceless");
  }
  x *= std::conj(tr) / std::abs(tr);  // rotate the global phase away
  x = DensityMatrix::hermitian_part(x);
  x /= x.trace().real();

  DensityMatrix rho(model.space(), x);
  const double residual = model.apply_generator(x).cwiseAbs().maxCoeff();
  if (residual > options.residual_tol) {
    throw SolverError("steady_state: residual " + std::to_string(residual) +
                      " exceeds " + std::to_string(options.residual_tol));
  }
  return rho;
}

}  // namespace aqm::dynamics
