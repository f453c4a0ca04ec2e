#pragma once

#include <random>

#include "aqm/states.hpp"

namespace aqm_test {

inline Eigen::MatrixXcd random_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = std::complex<double>(g(rng), g(rng));
  }
  return m;
}

inline Eigen::MatrixXcd random_hermitian(int dim, std::mt19937_64& rng) {
  Eigen::MatrixXcd a = random_matrix(dim, rng);
  return 0.5 * (a + a.adjoint());
}

// rho = A A^dag / Tr(A A^dag): full-rank positive unit-trace matrix.
inline aqm::DensityMatrix random_density(const aqm::HilbertSpace& space,
                                         std::mt19937_64& rng) {
  Eigen::MatrixXcd a = random_matrix(space.total_dim(), rng);
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  return aqm::DensityMatrix(space, 0.5 * (rho + rho.adjoint()));
}

// Haar-distributed unitary via QR of a complex Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(int dim, std::mt19937_64& rng) {
  Eigen::MatrixXcd a = random_matrix(dim, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    std::complex<double> d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

inline Eigen::VectorXcd random_state_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = std::complex<double>(g(rng), g(rng));
  v.normalize();
  return v;
}

}  // namespace aqm_test
