#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aqm/operator.hpp"
#include "aqm/trajectory.hpp"

namespace aqm::machines {

// Average fidelity of a gate timed by a clock of accuracy N, from the
// closed form (2 + e^{-pi^2/(2N)})/3.
inline double clock_limited_fidelity(double accuracy_n) {
  if (std::isinf(accuracy_n)) return 1.0;
  if (!(accuracy_n > 0.0)) {
    throw InvalidArgumentError("clock_limited_fidelity: N must be > 0");
  }
  return (2.0 + std::exp(-M_PI * M_PI / (2.0 * accuracy_n))) / 3.0;
}

struct FidelityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
};

namespace detail {

// Eigenphases of a unitary via a generic Hermitian combination of
// cos(H t) = (U + U^dag)/2 and sin-part (U - U^dag)/(2i); the two commute,
// so a generic mix is simultaneously diagonalizable with both. Falls back
// to other mixing weights when the reconstruction check fails.
struct Eigenphases {
  Eigen::VectorXd phases;  // arg of each unitary eigenvalue, in (-pi, pi]
  Matrix vectors;          // matching orthonormal eigenvectors
};

inline Eigenphases unitary_eigenphases(const Matrix& u) {
  const int d = int(u.rows());
  const Matrix id = Matrix::Identity(d, d);
  if ((u.adjoint() * u - id).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgumentError("gate is not unitary");
  }
  const Matrix cos_part = 0.5 * (u + u.adjoint());
  const Matrix sin_part = Complex(0, -0.5) * (u - u.adjoint());

  for (double mix : {0.6180339887498949, 0.3166247903553998,
                     0.1547005383792515}) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(cos_part + mix * sin_part);
    Eigenphases out;
    out.vectors = es.eigenvectors();
    out.phases.resize(d);
    for (int k = 0; k < d; ++k) {
      const Vector v = out.vectors.col(k);
      out.phases(k) = std::atan2(std::real(v.dot(sin_part * v)),
                                 std::real(v.dot(cos_part * v)));
    }
    Matrix rebuilt = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
      rebuilt += std::polar(1.0, out.phases(k)) * out.vectors.col(k) *
                 out.vectors.col(k).adjoint();
    }
    if ((rebuilt - u).cwiseAbs().maxCoeff() < 1e-8) return out;
  }
  throw SolverError("gate eigenphase extraction failed");
}

}  // namespace detail

// Monte Carlo estimate of the clock-limited average gate fidelity.
//
// The gate is one nominal period of its generator; the clock's timing
// jitter (duration std = t_bar/sqrt(N)) therefore enters as a phase error
// of std gap/sqrt(N) across the generator's widest eigenphase gap -- the
// driven transition. Test states are complex-Gaussian vectors projected
// into that two-level block, which is exactly the Haar distribution on
// the block, and the per-sample fidelity is |<psi|U^dag U_jittered|psi>|^2.
inline FidelityEstimate estimate_clocked_gate_fidelity(double accuracy_n,
                                                       const Operator& gate,
                                                       long n_samples,
                                                       std::uint64_t seed) {
  if (!(accuracy_n > 0.0) && !std::isinf(accuracy_n)) {
    throw InvalidArgumentError("estimate_clocked_gate_fidelity: N must be > 0");
  }
  if (n_samples < 1000) {
    throw InvalidArgumentError(
        "estimate_clocked_gate_fidelity: need n_samples >= 1000");
  }

  detail::Eigenphases eig = detail::unitary_eigenphases(gate.matrix());
  int lo = 0, hi = 0;
  for (int k = 1; k < eig.phases.size(); ++k) {
    if (eig.phases(k) < eig.phases(lo)) lo = k;
    if (eig.phases(k) > eig.phases(hi)) hi = k;
  }
  const double gap = eig.phases(hi) - eig.phases(lo);
  if (gap < 1e-9) {
    throw SolverError(
        "estimate_clocked_gate_fidelity: degenerate generator (all "
        "eigenphases equal); no driven transition to jitter");
  }
  const Vector v_lo = eig.vectors.col(lo);
  const Vector v_hi = eig.vectors.col(hi);

  const double sigma =
      std::isinf(accuracy_n) ? 0.0 : 1.0 / std::sqrt(accuracy_n);
  const int dim = gate.dim();

  traj::RandomStream rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (long i = 0; i < n_samples; ++i) {
    // Haar state in the driven block, via a projected Gaussian vector.
    Complex a(0, 0), b(0, 0);
    for (int j = 0; j < dim; ++j) {
      const Complex z(rng.normal(), rng.normal());
      a += std::conj(v_lo(j)) * z;
      b += std::conj(v_hi(j)) * z;
    }
    const double p = std::norm(b) / (std::norm(a) + std::norm(b));
    const double eps = sigma == 0.0 ? 0.0 : sigma * rng.normal();
    const double f = 1.0 - 2.0 * p * (1.0 - p) * (1.0 - std::cos(gap * eps));

    const double delta = f - mean;
    mean += delta / double(i + 1);
    m2 += delta * (f - mean);
  }

  FidelityEstimate est;
  est.mean = mean;
  est.n_samples = n_samples;
  est.std_error =
      std::sqrt(m2 / double(n_samples - 1) / double(n_samples));
  return est;
}

// CNOT on (control, target): flips the target when the control is |1>.
inline Operator cnot_gate() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 3) = 1.0;
  m(3, 2) = 1.0;
  return Operator(HilbertSpace({2, 2}), std::move(m));
}

}  // namespace aqm::machines
