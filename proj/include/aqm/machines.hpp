#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aqm/dynamics.hpp"

namespace aqm::machines {

using aqm::HilbertSpace;
using aqm::Matrix;
using aqm::Operator;
using aqm::Temperature;
using dynamics::JumpChannel;
using dynamics::LindbladModel;

inline constexpr double kDefaultResonanceTol = 1e-9;

// Channel tags used by the machine constructors.
inline constexpr const char* kHotTag = "hot";
inline constexpr const char* kColdTag = "cold";
inline constexpr const char* kTargetBathTag = "target-bath";
inline constexpr const char* kTickTag = "tick";
inline constexpr const char* kLadderLossTag = "ladder-loss";

namespace detail {

inline bool temperature_greater(const Temperature& a, const Temperature& b) {
  auto key = [](const Temperature& t) {
    if (t.is_zero()) return 0.0;
    if (t.is_infinite()) return std::numeric_limits<double>::infinity();
    return t.value();
  };
  return key(a) > key(b);
}

}  // namespace detail

// |sum of signed level splittings| <= tol: strict (microscopic) energy
// conservation for a resonant exchange.
struct EnergyBalance {
  bool passed = false;
  double residual = 0.0;
};

inline EnergyBalance validate_energy_conservation(
    const std::vector<double>& signed_splittings,
    double tol = kDefaultResonanceTol) {
  if (signed_splittings.empty()) {
    throw InvalidArgumentError("validate_energy_conservation: empty list");
  }
  double sum = 0.0;
  for (double s : signed_splittings) sum += s;
  return {std::abs(sum) <= tol, std::abs(sum)};
}

// Fermi's golden rule: 2 pi |<f|H'|i>|^2 mu(E_f), with hbar = 1. The
// density-of-states unit convention is the caller's responsibility.
inline double fermi_rate(double matrix_element_magnitude,
                         double density_of_states) {
  if (density_of_states < 0.0) {
    throw InvalidArgumentError("fermi_rate: negative density of states");
  }
  return 2.0 * M_PI * matrix_element_magnitude * matrix_element_magnitude *
         density_of_states;
}

// --- absorption refrigerator -------------------------------------------------
//
// Three qubits (hot, cold, target), each H_i = Delta_i sigma_z, coupled by
// the resonant exchange |101> <-> |010| (basis order hot, cold, target).
// Local thermal contacts on each qubit; the three-body coupling g must be
// weak against the gaps for the local-dissipator picture to hold.

struct FridgeSpec {
  double delta_hot = 0.0;     // half-gaps: level splitting is 2*Delta
  double delta_cold = 0.0;
  double delta_target = 0.0;
  Temperature t_hot = Temperature(1.0);
  Temperature t_cold = Temperature(1.0);
  std::optional<Temperature> t_target;  // optional target-bath contact
  double g = 0.0;
  double gamma = 0.0;
  double resonance_tol = kDefaultResonanceTol;

  double resonance_residual() const {
    return std::abs(delta_hot + delta_target - delta_cold);
  }

  void validate() const {
    if (!(delta_hot > 0.0) || !(delta_cold > 0.0) || !(delta_target > 0.0)) {
      throw InvalidArgumentError("fridge: all half-gaps must be > 0");
    }
    if (!(delta_cold > delta_hot)) {
      throw InvalidArgumentError(
          "fridge: the cold qubit needs the larger gap (delta_cold > delta_hot)");
    }
    if (resonance_residual() > resonance_tol) {
      throw InvalidArgumentError(
          "fridge: resonance delta_hot + delta_target = delta_cold violated, "
          "residual " +
          std::to_string(resonance_residual()));
    }
    if (t_cold.is_zero()) {
      throw InvalidArgumentError("fridge: t_cold must be > 0");
    }
    if (!detail::temperature_greater(t_hot, t_cold)) {
      throw InvalidArgumentError("fridge: need t_hot > t_cold");
    }
    if (g < 0.0) throw InvalidArgumentError("fridge: g must be >= 0");
    if (!(gamma > 0.0)) throw InvalidArgumentError("fridge: gamma must be > 0");
  }

  std::vector<std::string> regime_warnings() const {
    std::vector<std::string> notes;
    const double min_gap =
        2.0 * std::min({delta_hot, delta_cold, delta_target});
    if (g > 0.1 * min_gap) {
      notes.push_back(
          "coupling g exceeds 0.1 x min level splitting; the local-dissipator "
          "treatment is outside its weak-coupling regime");
    }
    return notes;
  }
};

inline LindbladModel build_fridge(const FridgeSpec& spec) {
  spec.validate();
  HilbertSpace space({2, 2, 2});  // (hot, cold, target)

  Operator h = embed(spec.delta_hot * sigma_z(), space, 0) +
               embed(spec.delta_cold * sigma_z(), space, 1) +
               embed(spec.delta_target * sigma_z(), space, 2);
  // |101><010| + h.c., basis labels (hot, cold, target).
  Matrix inter = Matrix::Zero(8, 8);
  inter(5, 2) = 1.0;
  inter(2, 5) = 1.0;
  h = h + spec.g * Operator(space, inter);

  std::vector<JumpChannel> channels = dynamics::thermal_channels(
      embed(sigma_minus(), space, 0), 2.0 * spec.delta_hot, spec.t_hot,
      spec.gamma, kHotTag);
  auto cold = dynamics::thermal_channels(embed(sigma_minus(), space, 1),
                                         2.0 * spec.delta_cold, spec.t_cold,
                                         spec.gamma, kColdTag);
  channels.insert(channels.end(), cold.begin(), cold.end());
  if (spec.t_target) {
    auto target = dynamics::thermal_channels(
        embed(sigma_minus(), space, 2), 2.0 * spec.delta_target,
        *spec.t_target, spec.gamma, kTargetBathTag);
    channels.insert(channels.end(), target.begin(), target.end());
  }
  return LindbladModel(space, h, std::move(channels));
}

// Bath temperatures keyed by tag, for entropy accounting.
inline std::map<std::string, Temperature> fridge_bath_temperatures(
    const FridgeSpec& spec) {
  std::map<std::string, Temperature> temps{{kHotTag, spec.t_hot},
                                           {kColdTag, spec.t_cold}};
  if (spec.t_target) temps.emplace(kTargetBathTag, *spec.t_target);
  return temps;
}

// --- autonomous ladder clock -------------------------------------------------
//
// Hot and cold qubits drive a d-rung ladder upward one rung per exchange
// |1,0,k> <-> |0,1,k+1>; emission from the top rung back to |0> is the
// tick. Basis order (hot, cold, ladder).

struct ClockSpec {
  double delta_hot = 0.0;   // half-gaps; here the hot qubit has the larger gap
  double delta_cold = 0.0;
  int d = 0;                // ladder rungs
  double delta_rung = 0.0;  // ladder spacing
  Temperature t_hot = Temperature(1.0);
  Temperature t_cold = Temperature(1.0);
  double g = 0.0;
  double gamma = 0.0;
  double gamma_tick = 0.0;
  double ladder_decay_rate = 0.0;  // optional uniform lower-rung leakage
  double resonance_tol = kDefaultResonanceTol;

  double resonance_residual() const {
    return std::abs(2.0 * delta_hot - 2.0 * delta_cold - delta_rung);
  }

  void validate() const {
    if (!(delta_hot > 0.0) || !(delta_cold > 0.0)) {
      throw InvalidArgumentError("clock: half-gaps must be > 0");
    }
    if (!(delta_hot > delta_cold)) {
      throw InvalidArgumentError(
          "clock: the hot qubit needs the larger gap (delta_hot > delta_cold)");
    }
    if (d < 2) throw InvalidArgumentError("clock: need d >= 2 ladder rungs");
    if (resonance_residual() > resonance_tol) {
      throw InvalidArgumentError(
          "clock: single-rung resonance 2*delta_hot - 2*delta_cold = "
          "delta_rung violated, residual " +
          std::to_string(resonance_residual()));
    }
    if (g < 0.0) throw InvalidArgumentError("clock: g must be >= 0");
    if (!(gamma > 0.0)) throw InvalidArgumentError("clock: gamma must be > 0");
    if (gamma_tick < 0.0) {
      throw InvalidArgumentError("clock: gamma_tick must be >= 0");
    }
    if (ladder_decay_rate < 0.0) {
      throw InvalidArgumentError("clock: ladder_decay_rate must be >= 0");
    }
  }

  std::vector<std::string> regime_warnings() const {
    std::vector<std::string> notes;
    const double min_gap =
        std::min({2.0 * delta_hot, 2.0 * delta_cold, delta_rung});
    if (g > 0.1 * min_gap) {
      notes.push_back(
          "coupling g exceeds 0.1 x min level splitting; the local-dissipator "
          "treatment is outside its weak-coupling regime");
    }
    return notes;
  }
};

inline LindbladModel build_clock(const ClockSpec& spec) {
  spec.validate();
  const int d = spec.d;
  HilbertSpace space({2, 2, d});  // (hot, cold, ladder)
  const int dim = space.total_dim();

  Operator ladder_h = Operator::zero(HilbertSpace::single(d));
  {
    Matrix m = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) m(j, j) = double(j) * spec.delta_rung;
    ladder_h = Operator(HilbertSpace::single(d), std::move(m));
  }
  Operator h = embed(spec.delta_hot * sigma_z(), space, 0) +
               embed(spec.delta_cold * sigma_z(), space, 1) +
               embed(ladder_h, space, 2);

  // Single-rung exchange |0,1,k+1><1,0,k| + h.c. for k = 0..d-2.
  // Index layout: |h,c,k> -> 2dh + dc + k.
  Matrix inter = Matrix::Zero(dim, dim);
  for (int k = 0; k + 1 < d; ++k) {
    const int from = 2 * d + k;   // |1,0,k>
    const int to = d + (k + 1);   // |0,1,k+1>
    inter(to, from) = 1.0;
    inter(from, to) = 1.0;
  }
  h = h + spec.g * Operator(space, inter);

  std::vector<JumpChannel> channels = dynamics::thermal_channels(
      embed(sigma_minus(), space, 0), 2.0 * spec.delta_hot, spec.t_hot,
      spec.gamma, kHotTag);
  auto cold = dynamics::thermal_channels(embed(sigma_minus(), space, 1),
                                         2.0 * spec.delta_cold, spec.t_cold,
                                         spec.gamma, kColdTag);
  channels.insert(channels.end(), cold.begin(), cold.end());

  // Tick: top rung drops to |0>, emitting one excitation.
  channels.push_back(
      {embed(ket_bra(d, 0, d - 1), space, 2), spec.gamma_tick, kTickTag});

  if (spec.ladder_decay_rate > 0.0) {
    for (int k = 0; k + 1 < d; ++k) {
      channels.push_back({embed(ket_bra(d, k, k + 1), space, 2),
                          spec.ladder_decay_rate, kLadderLossTag});
    }
  }
  return LindbladModel(space, h, std::move(channels));
}

inline std::map<std::string, Temperature> clock_bath_temperatures(
    const ClockSpec& spec) {
  std::map<std::string, Temperature> temps{{kHotTag, spec.t_hot},
                                           {kColdTag, spec.t_cold},
                                           {kTickTag, Temperature::zero()}};
  if (spec.ladder_decay_rate > 0.0) {
    temps.emplace(kLadderLossTag, Temperature::zero());
  }
  return temps;
}

// --- switch ------------------------------------------------------------------
//
// H_tot = sum_j H_j (x) |phi_j><phi_j| + H_S + H_R on rest (x) switch,
// identities implicitly tensored on.

struct SwitchBranch {
  Operator hamiltonian;  // acts on the rest space
  int phi_index = 0;     // switch eigenstate selecting this branch
};

inline Operator build_switch_hamiltonian(const std::vector<SwitchBranch>& branches,
                                         const Operator& h_switch,
                                         const Operator& h_rest) {
  if (!h_switch.is_hermitian() || !h_rest.is_hermitian()) {
    throw InvalidArgumentError("switch: H_S and H_R must be Hermitian");
  }
  const int switch_dim = h_switch.dim();
  std::vector<bool> used(std::size_t(switch_dim), false);
  for (const auto& branch : branches) {
    if (branch.hamiltonian.space() != h_rest.space()) {
      throw DimensionError("switch: branch Hamiltonian not on the rest space");
    }
    if (!branch.hamiltonian.is_hermitian()) {
      throw InvalidArgumentError("switch: branch Hamiltonian must be Hermitian");
    }
    if (branch.phi_index < 0 || branch.phi_index >= switch_dim) {
      throw DimensionError("switch: phi index " +
                           std::to_string(branch.phi_index) + " out of range");
    }
    if (used[std::size_t(branch.phi_index)]) {
      throw InvalidArgumentError("switch: duplicate phi index " +
                                 std::to_string(branch.phi_index));
    }
    used[std::size_t(branch.phi_index)] = true;
  }

  HilbertSpace joint = h_rest.space().tensor(h_switch.space());
  Operator total = Operator::zero(joint);
  for (const auto& branch : branches) {
    total = total + kron(branch.hamiltonian,
                         ket_bra(switch_dim, branch.phi_index, branch.phi_index));
  }
  const std::size_t switch_position = joint.n_subsystems() - 1;
  total = total + embed(h_switch, joint, switch_position);
  total = total + kron(h_rest, Operator::identity(h_switch.space()));
  return total;
}

// --- dispersive qubit-mode system ---------------------------------------------

// Delta sigma_z + omega a^dag a + chi sigma_z a^dag a on [2, n_max+1].
// Diagonal in the product basis, so the spectrum is exactly
// (+/-)Delta + n (omega +/- chi).
inline Operator build_dispersive(double delta, double omega, double chi,
                                 int n_max) {
  if (n_max < 2) {
    throw InvalidArgumentError("dispersive: n_max must be >= 2");
  }
  const int n_levels = n_max + 1;
  HilbertSpace space({2, n_levels});
  Operator number = number_operator(n_levels);
  return embed(delta * sigma_z(), space, 0) +
         embed(omega * number, space, 1) +
         kron(chi * sigma_z(), number);
}

// Thermal occupation of the truncation rung n_max for a mode of bare
// frequency omega at temperature T; above 1e-6 the truncation deserves a
// warning.
inline double dispersive_top_rung_occupation(double omega, int n_max,
                                             const Temperature& t_mode) {
  if (!(omega > 0.0)) {
    throw InvalidArgumentError("dispersive: omega must be > 0 here");
  }
  if (t_mode.is_zero()) return 0.0;
  if (t_mode.is_infinite()) return 1.0 / double(n_max + 1);
  const double x = t_mode.boltzmann(omega);  // e^{-omega/T}
  return (1.0 - x) * std::pow(x, double(n_max));
}

inline constexpr double kTruncationOccupationLimit = 1e-6;

}  // namespace aqm::machines
