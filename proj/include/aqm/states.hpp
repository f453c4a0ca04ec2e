#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aqm/operator.hpp"

namespace aqm {

// Validation tolerances for density-matrix invariants.
struct StateTolerances {
  double hermiticity = 1e-10;  // max entrywise |rho - rho^dag|
  double trace = 1e-9;         // |Tr rho - 1|
  double positivity = 1e-9;    // min eigenvalue >= -positivity
};

// Bath temperature with explicit zero and infinite limits; Boltzmann's
// constant is 1. Plain large/small floats overflow e^{-H/T}, so the
// limits are distinct states rather than sentinel values.
class Temperature {
 public:
  explicit Temperature(double value) : value_(value) {
    if (!(value > 0.0) || std::isinf(value)) {
      throw InvalidArgumentError(
          "Temperature: finite value must be > 0 (use zero()/infinite())");
    }
  }

  static Temperature zero() { return Temperature(Kind::Zero); }
  static Temperature infinite() { return Temperature(Kind::Infinite); }

  bool is_zero() const { return kind_ == Kind::Zero; }
  bool is_infinite() const { return kind_ == Kind::Infinite; }
  bool is_finite() const { return kind_ == Kind::Finite; }

  double value() const {
    if (!is_finite()) {
      throw InvalidArgumentError("Temperature: no finite value in limit case");
    }
    return value_;
  }

  // e^{-gap/T} for gap > 0; the detailed-balance ratio of excitation to
  // decay rates.
  double boltzmann(double gap) const {
    if (is_zero()) return 0.0;
    if (is_infinite()) return 1.0;
    return std::exp(-gap / value_);
  }

  // 1/T as used in entropy accounting; 0 for the infinite limit.
  double inverse() const {
    if (is_zero()) return std::numeric_limits<double>::infinity();
    if (is_infinite()) return 0.0;
    return 1.0 / value_;
  }

  friend bool operator==(const Temperature& a, const Temperature& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }

 private:
  enum class Kind { Finite, Zero, Infinite };
  explicit Temperature(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

// Dense density matrix; construction validates Hermiticity, unit trace
// and positivity.
class DensityMatrix {
 public:
  DensityMatrix(HilbertSpace space, Matrix entries,
                const StateTolerances& tol = {})
      : space_(std::move(space)), m_(std::move(entries)) {
    if (m_.rows() != space_.total_dim() || m_.cols() != space_.total_dim()) {
      throw DimensionError("DensityMatrix: matrix shape does not match space");
    }
    validate(tol);
  }

  static DensityMatrix pure(const HilbertSpace& space, const Vector& psi) {
    if (psi.size() != space.total_dim()) {
      throw DimensionError("DensityMatrix::pure: vector length mismatch");
    }
    const double n = psi.norm();
    if (n <= 0.0) {
      throw InvalidArgumentError("DensityMatrix::pure: zero vector");
    }
    Vector u = psi / n;
    return DensityMatrix(space, u * u.adjoint());
  }

  static DensityMatrix basis_state(const HilbertSpace& space, int index) {
    Vector psi = Vector::Zero(space.total_dim());
    psi(index) = 1.0;
    return pure(space, psi);
  }

  static DensityMatrix maximally_mixed(const HilbertSpace& space) {
    const int d = space.total_dim();
    return DensityMatrix(space, Matrix::Identity(d, d) / double(d));
  }

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  int dim() const { return space_.total_dim(); }

  Complex entry(int j, int k) const { return m_(j, k); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m_),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  Operator as_operator() const { return Operator(space_, m_); }

  static Matrix hermitian_part(const Matrix& m) {
    return 0.5 * (m + m.adjoint());
  }

 private:
  void validate(const StateTolerances& tol) const {
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol.hermiticity) {
      throw InvariantError("DensityMatrix: Hermiticity violated, max|rho-rho^dag| = " +
                           std::to_string(herm));
    }
    const double tr_err = std::abs(m_.trace() - Complex(1.0, 0.0));
    if (tr_err > tol.trace) {
      throw InvariantError("DensityMatrix: trace deviates from 1 by " +
                           std::to_string(tr_err));
    }
    const double min_eig = min_eigenvalue();
    if (min_eig < -tol.positivity) {
      throw InvariantError("DensityMatrix: negative eigenvalue " +
                           std::to_string(min_eig));
    }
  }

  HilbertSpace space_;
  Matrix m_;
};

inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::set<std::size_t>& keep) {
  Operator reduced = partial_trace(rho.as_operator(), keep);
  // Trace is preserved exactly up to summation roundoff (< 1e-12).
  return DensityMatrix(reduced.space(), reduced.matrix());
}

// Tensor product of states (product state).
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Operator k = kron(a.as_operator(), b.as_operator());
  return DensityMatrix(k.space(), k.matrix());
}

// --- thermal states ---------------------------------------------------------

// e^{-H/T} / Tr e^{-H/T}, evaluated in H's eigenbasis. T = 0 yields the
// (possibly degenerate) ground-space projector normalized to unit trace;
// T = infinity yields id/Dim.
inline DensityMatrix thermal_state(const Operator& hamiltonian,
                                   const Temperature& temperature) {
  if (!hamiltonian.is_hermitian()) {
    throw InvalidArgumentError("thermal_state: Hamiltonian is not Hermitian");
  }
  const int d = hamiltonian.dim();
  if (temperature.is_infinite()) {
    return DensityMatrix::maximally_mixed(hamiltonian.space());
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian.matrix());
  const Eigen::VectorXd energies = es.eigenvalues();
  const Matrix& vectors = es.eigenvectors();
  const double e_min = energies.minCoeff();

  Eigen::VectorXd weights(d);
  if (temperature.is_zero()) {
    // Degenerate ground levels share the weight equally.
    const double degeneracy_tol = 1e-12 * std::max(1.0, std::abs(e_min));
    for (int i = 0; i < d; ++i) {
      weights(i) = (energies(i) - e_min <= degeneracy_tol) ? 1.0 : 0.0;
    }
  } else {
    const double beta = 1.0 / temperature.value();
    for (int i = 0; i < d; ++i) {
      weights(i) = std::exp(-beta * (energies(i) - e_min));
    }
  }
  weights /= weights.sum();

  Matrix rho = vectors * weights.asDiagonal() * vectors.adjoint();
  return DensityMatrix(hamiltonian.space(),
                       DensityMatrix::hermitian_part(rho));
}

// --- figures of merit -------------------------------------------------------

// Tr(rho^2); 1 for pure states, 1/Dim for the maximally mixed state.
inline double purity(const DensityMatrix& rho) {
  const Complex tr = (rho.matrix() * rho.matrix()).trace();
  if (std::abs(tr.imag()) > 1e-12) {
    throw InvariantError("purity: imaginary residue " +
                         std::to_string(tr.imag()));
  }
  return tr.real();
}

// Uhlmann fidelity (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2.
inline double fidelity(const DensityMatrix& sigma, const DensityMatrix& rho) {
  if (sigma.space() != rho.space()) {
    throw DimensionError("fidelity: states on different spaces");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma.matrix());
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Matrix sqrt_sigma = es.eigenvectors() * vals.asDiagonal() *
                      es.eigenvectors().adjoint();
  Matrix inner = sqrt_sigma * rho.matrix() * sqrt_sigma;
  Eigen::SelfAdjointEigenSolver<Matrix> es2(
      DensityMatrix::hermitian_part(inner), Eigen::EigenvaluesOnly);
  double root_sum = 0.0;
  for (int i = 0; i < es2.eigenvalues().size(); ++i) {
    root_sum += std::sqrt(std::max(0.0, es2.eigenvalues()(i)));
  }
  return std::min(1.0, root_sum * root_sum);
}

// --- coherence modes --------------------------------------------------------
//
// Mode omega of coherence collects the matrix elements rho_jk, in H's
// eigenbasis, with E_j - E_k = omega. The weight is the l1-style sum
// sum |rho_jk|. Eigenvalue differences within mode_tol are treated as
// the same mode.

inline constexpr double kDefaultModeTol = 1e-9;

namespace detail {

inline std::pair<Eigen::VectorXd, Matrix> energy_basis(const Operator& h) {
  if (!h.is_hermitian()) {
    throw InvalidArgumentError("coherence modes: Hamiltonian not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace detail

inline double coherence_mode_weight(const DensityMatrix& rho,
                                    const Operator& hamiltonian, double omega,
                                    double mode_tol = kDefaultModeTol) {
  if (rho.space() != hamiltonian.space()) {
    throw DimensionError("coherence_mode_weight: space mismatch");
  }
  auto [energies, vectors] = detail::energy_basis(hamiltonian);
  Matrix rho_e = vectors.adjoint() * rho.matrix() * vectors;
  const int d = rho_e.rows();
  double weight = 0.0;
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      if (std::abs(energies(j) - energies(k) - omega) <= mode_tol) {
        weight += std::abs(rho_e(j, k));
      }
    }
  }
  return weight;
}

// All distinct modes (omega, weight), omegas merged within mode_tol,
// sorted ascending. Includes the omega = 0 (diagonal) mode.
inline std::vector<std::pair<double, double>> coherence_modes(
    const DensityMatrix& rho, const Operator& hamiltonian,
    double mode_tol = kDefaultModeTol) {
  if (rho.space() != hamiltonian.space()) {
    throw DimensionError("coherence_modes: space mismatch");
  }
  auto [energies, vectors] = detail::energy_basis(hamiltonian);
  Matrix rho_e = vectors.adjoint() * rho.matrix() * vectors;
  const int d = rho_e.rows();

  std::vector<std::pair<double, double>> entries;  // (omega_jk, |rho_jk|)
  entries.reserve(std::size_t(d) * d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      entries.emplace_back(energies(j) - energies(k), std::abs(rho_e(j, k)));
    }
  }
  std::sort(entries.begin(), entries.end());

  std::vector<std::pair<double, double>> modes;
  for (const auto& [omega, w] : entries) {
    if (!modes.empty() && omega - modes.back().first <= mode_tol) {
      modes.back().second += w;
    } else {
      modes.emplace_back(omega, w);
    }
  }
  return modes;
}

}  // namespace aqm
