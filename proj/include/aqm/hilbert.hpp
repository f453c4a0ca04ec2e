#pragma once

#include <string>
#include <vector>

#include "aqm/errors.hpp"

namespace aqm {

// Refusal threshold for the total dimension of a tensor-product space.
// Dense storage grows as total_dim^2 (and the vectorized generator as
// total_dim^4), so exceeding the cap is an error rather than a silent
// slowdown.
inline constexpr int kDefaultDimensionCap = 256;

// Ordered list of subsystem dimensions. Subsystem 0 is the leftmost
// tensor factor, i.e. the most significant digit of a basis index:
// for dims {2,2,2} the basis state |abc> has index 4a + 2b + c.
class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<int> dims,
                        int dimension_cap = kDefaultDimensionCap)
      : dims_(std::move(dims)) {
    if (dims_.empty()) {
      throw DimensionError("HilbertSpace: subsystem list is empty");
    }
    long long total = 1;
    for (int d : dims_) {
      if (d < 2) {
        throw DimensionError("HilbertSpace: subsystem dimension " +
                             std::to_string(d) + " < 2");
      }
      total *= d;
      if (total > dimension_cap) {
        throw DimensionError("HilbertSpace: total dimension exceeds cap " +
                             std::to_string(dimension_cap));
      }
    }
    total_dim_ = static_cast<int>(total);
  }

  static HilbertSpace qubit() { return HilbertSpace({2}); }
  static HilbertSpace single(int dim) { return HilbertSpace({dim}); }

  const std::vector<int>& dims() const { return dims_; }
  int dim(std::size_t subsystem) const { return dims_.at(subsystem); }
  std::size_t n_subsystems() const { return dims_.size(); }
  int total_dim() const { return total_dim_; }

  // Tensor-product composition: this (+) other, left to right.
  HilbertSpace tensor(const HilbertSpace& other) const {
    std::vector<int> d = dims_;
    d.insert(d.end(), other.dims_.begin(), other.dims_.end());
    return HilbertSpace(std::move(d));
  }

  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) {
    return a.dims_ == b.dims_;
  }
  friend bool operator!=(const HilbertSpace& a, const HilbertSpace& b) {
    return !(a == b);
  }

 private:
  std::vector<int> dims_;
  int total_dim_ = 0;
};

}  // namespace aqm
