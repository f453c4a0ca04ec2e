#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aqm/states.hpp"

namespace aqm::dynamics {

using aqm::Complex;
using aqm::DensityMatrix;
using aqm::HilbertSpace;
using aqm::Matrix;
using aqm::Operator;
using aqm::Temperature;

// One dissipative process in GKSL form. The tag names the bath (or the
// "tick" output) so heat currents and emission events can be attributed.
struct JumpChannel {
  Operator op;
  double rate = 0.0;
  std::string tag;
};

class LindbladModel {
 public:
  LindbladModel(HilbertSpace space, Operator hamiltonian,
                std::vector<JumpChannel> channels)
      : space_(std::move(space)),
        hamiltonian_(std::move(hamiltonian)),
        channels_(std::move(channels)) {
    if (hamiltonian_.space() != space_) {
      throw DimensionError("LindbladModel: Hamiltonian on wrong space");
    }
    if (!hamiltonian_.is_hermitian(1e-10)) {
      throw InvariantError("LindbladModel: Hamiltonian not Hermitian");
    }
    for (const auto& c : channels_) {
      if (c.op.space() != space_) {
        throw DimensionError("LindbladModel: channel '" + c.tag +
                             "' on wrong space");
      }
      if (c.rate < 0.0) {
        throw InvalidArgumentError("LindbladModel: negative rate on channel '" +
                                   c.tag + "'");
      }
    }
    for (const auto& c : channels_) {
      ldag_l_.push_back(c.op.matrix().adjoint() * c.op.matrix());
    }
  }

  const HilbertSpace& space() const { return space_; }
  const Operator& hamiltonian() const { return hamiltonian_; }
  const std::vector<JumpChannel>& channels() const { return channels_; }
  const Matrix& ldag_l(std::size_t c) const { return ldag_l_[c]; }

  bool has_tag(const std::string& tag) const {
    for (const auto& c : channels_) {
      if (c.tag == tag) return true;
    }
    return false;
  }

  std::vector<std::string> tags() const {
    std::vector<std::string> out;
    for (const auto& c : channels_) {
      bool seen = false;
      for (const auto& t : out) seen = seen || (t == c.tag);
      if (!seen) out.push_back(c.tag);
    }
    return out;
  }

  // Full GKSL generator: -i[H, rho] + sum_c rate_c D[L_c](rho).
  Matrix apply_generator(const Matrix& rho) const {
    const Matrix& h = hamiltonian_.matrix();
    Matrix out = Complex(0, -1) * (h * rho - rho * h);
    accumulate_dissipator(rho, out, nullptr);
    return out;
  }

  // Dissipator restricted to channels carrying `tag`.
  Matrix apply_dissipator(const Matrix& rho, const std::string& tag) const {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    accumulate_dissipator(rho, out, &tag);
    return out;
  }

 private:
  void accumulate_dissipator(const Matrix& rho, Matrix& out,
                             const std::string* tag) const {
    for (std::size_t c = 0; c < channels_.size(); ++c) {
      const auto& ch = channels_[c];
      if (ch.rate == 0.0) continue;
      if (tag && ch.tag != *tag) continue;
      const Matrix& l = ch.op.matrix();
      const Matrix& ll = ldag_l_[c];
      out.noalias() += ch.rate * (l * rho * l.adjoint());
      Matrix anti = ll * rho;
      anti.noalias() += rho * ll;
      out.noalias() -= (0.5 * ch.rate) * anti;
    }
  }

  HilbertSpace space_;
  Operator hamiltonian_;
  std::vector<JumpChannel> channels_;
  std::vector<Matrix> ldag_l_;
};

// Detailed-balance thermal contact: a decay channel at the base rate and
// the matching excitation channel at rate gamma * e^{-gap/T}, so an
// uncoupled transition relaxes to its thermal state.
inline std::vector<JumpChannel> thermal_channels(const Operator& coupling_op,
                                                 double gap,
                                                 const Temperature& temperature,
                                                 double gamma,
                                                 const std::string& tag) {
  if (gamma <= 0.0) {
    throw InvalidArgumentError("thermal_channels: gamma must be > 0");
  }
  if (gap <= 0.0) {
    throw InvalidArgumentError("thermal_channels: gap must be > 0");
  }
  std::vector<JumpChannel> out;
  out.push_back({coupling_op, gamma, tag});
  out.push_back({coupling_op.adjoint(), gamma * temperature.boltzmann(gap), tag});
  return out;
}

// d rho/dt for a valid state; traceless and Hermitian by construction.
inline Matrix liouvillian_apply(const LindbladModel& model,
                                const DensityMatrix& rho) {
  if (rho.space() != model.space()) {
    throw DimensionError("liouvillian_apply: state on wrong space");
  }
  return model.apply_generator(rho.matrix());
}

// Tr(H * D_tag[rho]). Positive sign = energy flowing into the system
// from that bath.
inline double heat_current(const LindbladModel& model, const DensityMatrix& rho,
                           const std::string& tag) {
  if (!model.has_tag(tag)) {
    throw InvalidArgumentError("heat_current: unknown tag '" + tag + "'");
  }
  const Complex q =
      (model.hamiltonian().matrix() * model.apply_dissipator(rho.matrix(), tag))
          .trace();
  return q.real();
}

// Total jump intensity sum_c rate_c Tr(L^dag L rho) of the channels
// carrying `tag`; for the clock's tick channel this is the tick current.
inline double jump_rate(const LindbladModel& model, const DensityMatrix& rho,
                        const std::string& tag) {
  if (!model.has_tag(tag)) {
    throw InvalidArgumentError("jump_rate: unknown tag '" + tag + "'");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < model.channels().size(); ++c) {
    if (model.channels()[c].tag != tag) continue;
    total +=
        model.channels()[c].rate * (model.ldag_l(c) * rho.matrix()).trace().real();
  }
  return total;
}

// sum_tags (-heat_current/T). Every tag in the model must be assigned a
// temperature; pure-emission channels (e.g. "tick") count as T = 0 sinks,
// contributing +infinity while they emit and diverging negative only if
// they were to absorb.
inline double entropy_production_rate(
    const LindbladModel& model, const DensityMatrix& rho,
    const std::map<std::string, Temperature>& bath_temperatures) {
  double total = 0.0;
  for (const auto& tag : model.tags()) {
    auto it = bath_temperatures.find(tag);
    if (it == bath_temperatures.end()) {
      throw InvalidArgumentError("entropy_production_rate: no temperature for tag '" +
                                 tag + "'");
    }
    const double q = heat_current(model, rho, tag);
    if (it->second.is_zero()) {
      const double floor = 1e-12 * std::max(1.0, model.hamiltonian().max_abs());
      if (std::abs(q) <= floor) continue;
      return q < 0.0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
    }
    total += -q * it->second.inverse();
  }
  return total;
}

// Crude spectral scale of the generator, used for the dt * scale <= 0.1
// step-size check: 2 ||H||_2 + 2 sum_c rate_c ||L_c||_2^2.
inline double spectral_scale(const LindbladModel& model) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(model.hamiltonian().matrix(),
                                           Eigen::EigenvaluesOnly);
  double scale = 2.0 * es.eigenvalues().cwiseAbs().maxCoeff();
  for (std::size_t c = 0; c < model.channels().size(); ++c) {
    Eigen::SelfAdjointEigenSolver<Matrix> en(model.ldag_l(c),
                                             Eigen::EigenvaluesOnly);
    scale += 2.0 * model.channels()[c].rate * en.eigenvalues().maxCoeff();
  }
  return scale;
}

}  // namespace aqm::dynamics
