#pragma once

#include <Eigen/Dense>
#include <complex>
#include <set>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>
#include <utility>
#include <vector>

#include "aqm/hilbert.hpp"

namespace aqm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Dense complex operator tagged with the space it acts on.
class Operator {
 public:
  Operator(HilbertSpace space, Matrix entries)
      : space_(std::move(space)), m_(std::move(entries)) {
    if (m_.rows() != space_.total_dim() || m_.cols() != space_.total_dim()) {
      throw DimensionError("Operator: matrix is " + std::to_string(m_.rows()) +
                           "x" + std::to_string(m_.cols()) +
                           " but the space has dimension " +
                           std::to_string(space_.total_dim()));
    }
  }

  static Operator zero(const HilbertSpace& space) {
    return Operator(space, Matrix::Zero(space.total_dim(), space.total_dim()));
  }
  static Operator identity(const HilbertSpace& space) {
    return Operator(space,
                    Matrix::Identity(space.total_dim(), space.total_dim()));
  }

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  int dim() const { return space_.total_dim(); }

  Operator adjoint() const { return Operator(space_, m_.adjoint()); }
  Complex trace() const { return m_.trace(); }

  double max_abs() const {
    return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff();
  }

  bool is_hermitian(double tol = 1e-10) const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }

  friend Operator operator+(const Operator& a, const Operator& b) {
    require_same_space(a, b, "operator+");
    return Operator(a.space_, a.m_ + b.m_);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    require_same_space(a, b, "operator-");
    return Operator(a.space_, a.m_ - b.m_);
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a, b, "operator*");
    return Operator(a.space_, a.m_ * b.m_);
  }
  friend Operator operator*(Complex c, const Operator& a) {
    return Operator(a.space_, c * a.m_);
  }
  friend Operator operator*(double c, const Operator& a) {
    return Operator(a.space_, c * a.m_);
  }
  friend Operator operator-(const Operator& a) {
    return Operator(a.space_, -a.m_);
  }

 private:
  static void require_same_space(const Operator& a, const Operator& b,
                                 const char* what) {
    if (a.space_ != b.space_) {
      throw DimensionError(std::string(what) + ": operands on different spaces");
    }
  }

  HilbertSpace space_;
  Matrix m_;
};

inline Operator commutator(const Operator& a, const Operator& b) {
  return a * b - b * a;
}

// --- elementary building blocks -------------------------------------------
//
// Basis convention: index 0 is |0>, the eigenvalue -1 eigenstate of sigma_z;
// index 1 is |1>, the eigenvalue +1 eigenstate. Hence sigma_z = diag(-1, +1)
// and the ground state of Delta*sigma_z (Delta > 0) is |0>.

inline Operator ket_bra(int dim, int j, int k) {
  if (j < 0 || k < 0 || j >= dim || k >= dim) {
    throw DimensionError("ket_bra: index out of range");
  }
  Matrix m = Matrix::Zero(dim, dim);
  m(j, k) = 1.0;
  return Operator(HilbertSpace::single(dim), std::move(m));
}

inline Operator sigma_z() {
  Matrix m(2, 2);
  m << -1, 0, 0, 1;
  return Operator(HilbertSpace::qubit(), std::move(m));
}

inline Operator sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return Operator(HilbertSpace::qubit(), std::move(m));
}

inline Operator sigma_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return Operator(HilbertSpace::qubit(), std::move(m));
}

inline Operator sigma_plus() { return ket_bra(2, 1, 0); }
inline Operator sigma_minus() { return ket_bra(2, 0, 1); }

// Truncated bosonic annihilation operator on n_levels Fock states.
inline Operator annihilation(int n_levels) {
  if (n_levels < 2) {
    throw DimensionError("annihilation: need at least 2 levels");
  }
  Matrix m = Matrix::Zero(n_levels, n_levels);
  for (int n = 1; n < n_levels; ++n) m(n - 1, n) = std::sqrt(double(n));
  return Operator(HilbertSpace::single(n_levels), std::move(m));
}

inline Operator number_operator(int n_levels) {
  Matrix m = Matrix::Zero(n_levels, n_levels);
  for (int n = 0; n < n_levels; ++n) m(n, n) = double(n);
  return Operator(HilbertSpace::single(n_levels), std::move(m));
}

// --- tensor products and embeddings ----------------------------------------

inline Operator kron(const Operator& a, const Operator& b) {
  HilbertSpace combined = a.space().tensor(b.space());
  Matrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return Operator(std::move(combined), std::move(m));
}

// id (x) ... (x) op (x) ... (x) id, with op placed at `position` in `space`.
inline Operator embed(const Operator& op, const HilbertSpace& space,
                      std::size_t position) {
  if (position >= space.n_subsystems()) {
    throw DimensionError("embed: subsystem index " + std::to_string(position) +
                         " out of range");
  }
  if (op.dim() != space.dim(position)) {
    throw DimensionError("embed: operator dimension " +
                         std::to_string(op.dim()) +
                         " does not match subsystem dimension " +
                         std::to_string(space.dim(position)));
  }
  int pre = 1, post = 1;
  for (std::size_t i = 0; i < position; ++i) pre *= space.dim(i);
  for (std::size_t i = position + 1; i < space.n_subsystems(); ++i) {
    post *= space.dim(i);
  }
  Matrix m = Eigen::kroneckerProduct(
      Matrix::Identity(pre, pre),
      Eigen::kroneckerProduct(op.matrix(), Matrix::Identity(post, post))
          .eval());
  return Operator(space, std::move(m));
}

// Partial trace over all subsystems NOT in `keep`; kept subsystems retain
// their original relative order.
inline Operator partial_trace(const Operator& op,
                              const std::set<std::size_t>& keep) {
  const HilbertSpace& space = op.space();
  if (keep.empty()) {
    throw DimensionError("partial_trace: empty keep set");
  }
  for (std::size_t k : keep) {
    if (k >= space.n_subsystems()) {
      throw DimensionError("partial_trace: subsystem index " +
                           std::to_string(k) + " out of range");
    }
  }

  const std::size_t n = space.n_subsystems();
  std::vector<int> kept_dims, traced_dims;
  std::vector<std::size_t> kept_idx, traced_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep.count(i)) {
      kept_dims.push_back(space.dim(i));
      kept_idx.push_back(i);
    } else {
      traced_dims.push_back(space.dim(i));
      traced_idx.push_back(i);
    }
  }
  if (traced_idx.empty()) return op;  // keep everything

  // Row-major strides of each subsystem within a full-space basis index.
  std::vector<long> stride(n, 1);
  for (std::size_t i = n; i-- > 1;) {
    stride[i - 1] = stride[i] * space.dim(i);
  }

  auto mixed_radix = [](long flat, const std::vector<int>& dims,
                        std::vector<int>& digits) {
    for (std::size_t i = dims.size(); i-- > 0;) {
      digits[i] = int(flat % dims[i]);
      flat /= dims[i];
    }
  };

  long kept_total = 1, traced_total = 1;
  for (int d : kept_dims) kept_total *= d;
  for (int d : traced_dims) traced_total *= d;

  Matrix out = Matrix::Zero(kept_total, kept_total);
  std::vector<int> kd(kept_dims.size()), ld(kept_dims.size()),
      td(traced_dims.size());
  for (long r = 0; r < kept_total; ++r) {
    mixed_radix(r, kept_dims, kd);
    for (long c = 0; c < kept_total; ++c) {
      mixed_radix(c, kept_dims, ld);
      Complex sum = 0.0;
      for (long t = 0; t < traced_total; ++t) {
        mixed_radix(t, traced_dims, td);
        long row = 0, col = 0;
        for (std::size_t i = 0; i < kept_idx.size(); ++i) {
          row += kd[i] * stride[kept_idx[i]];
          col += ld[i] * stride[kept_idx[i]];
        }
        for (std::size_t i = 0; i < traced_idx.size(); ++i) {
          long off = td[i] * stride[traced_idx[i]];
          row += off;
          col += off;
        }
        sum += op.matrix()(row, col);
      }
      out(r, c) = sum;
    }
  }
  return Operator(HilbertSpace(std::move(kept_dims), space.total_dim()),
                  std::move(out));
}

}  // namespace aqm
