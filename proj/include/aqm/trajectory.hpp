#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unsupported/Eigen/MatrixFunctions>
#include <utility>
#include <vector>

#include "aqm/lindblad.hpp"

namespace aqm::traj {

using aqm::Complex;
using aqm::Matrix;
using aqm::Vector;
using dynamics::LindbladModel;

// --- deterministic random streams -------------------------------------------
//
// std::uniform_real_distribution and friends are implementation-defined,
// so trajectories would not be bit-identical across standard libraries.
// The generator below (splitmix64) plus explicit bit-to-double conversion
// keeps every record reproducible from (model, psi0, t_final, seed) alone.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  // Uniform in [0, 1), 53 mantissa bits.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (cached second deviate).
  double normal() {
    if (cached_) {
      const double v = *cached_;
      cached_.reset();
      return v;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
  std::optional<double> cached_;
};

// Per-trajectory stream: hash(root, index), so ensembles reproduce
// independently of execution order or thread count.
inline std::uint64_t derive_stream_seed(std::uint64_t root,
                                        std::uint64_t index) {
  std::uint64_t s = root;
  const std::uint64_t mixed_root = detail::splitmix64(s);
  s = mixed_root ^ (0x9E3779B97F4A7C15ull * (index + 1));
  return detail::splitmix64(s);
}

// --- trajectory records ------------------------------------------------------

struct JumpEvent {
  double time;
  std::uint32_t channel;  // index into channel_tags
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  double t_final = 0.0;
  std::vector<JumpEvent> events;          // strictly increasing times
  std::vector<std::string> channel_tags;  // channel index -> tag
  Vector final_state;

  const std::string& tag_of(const JumpEvent& e) const {
    return channel_tags.at(e.channel);
  }
  bool has_tag(const std::string& tag) const {
    for (const auto& t : channel_tags) {
      if (t == tag) return true;
    }
    return false;
  }
};

struct UnravelOptions {
  double dt = 1e-2;
  // Refuse to run when rate * dt reaches this per-step jump probability.
  double max_jump_probability = 0.05;
};

namespace detail {

struct Workspace {
  Matrix u_eff;                               // exp(-i H_eff dt)
  std::vector<Matrix> jump_ops;               // L_c
  std::vector<double> rates;                  // rate_c
  std::vector<std::uint32_t> channel_of;      // workspace idx -> model idx
  std::vector<Eigen::VectorXd> diag_weights;  // rate * diag(L^dag L), if diagonal
  std::vector<Matrix> dense_weights;          // rate * L^dag L otherwise
  long n_steps = 0;
  double step = 0.0;
};

inline Workspace build_workspace(const LindbladModel& model, double t_final,
                                 const UnravelOptions& options) {
  if (!(options.dt > 0.0) || !(t_final > 0.0)) {
    throw InvalidArgumentError("unravel: dt and t_final must be > 0");
  }
  Workspace w;
  w.n_steps = std::max<long>(1, long(std::ceil(t_final / options.dt - 1e-12)));
  w.step = t_final / double(w.n_steps);

  const int d = model.space().total_dim();
  Matrix h_eff = model.hamiltonian().matrix();
  for (std::size_t c = 0; c < model.channels().size(); ++c) {
    const auto& ch = model.channels()[c];
    if (ch.rate == 0.0) continue;
    h_eff -= Complex(0, 0.5) * ch.rate * model.ldag_l(c);

    w.jump_ops.push_back(ch.op.matrix());
    w.rates.push_back(ch.rate);
    w.channel_of.push_back(std::uint32_t(c));
    const Matrix& ll = model.ldag_l(c);
    Matrix off = ll;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() == 0.0) {
      w.diag_weights.push_back(ch.rate * ll.diagonal().real());
      w.dense_weights.emplace_back();
    } else {
      w.diag_weights.emplace_back();
      w.dense_weights.push_back(ch.rate * ll);
    }
  }
  w.u_eff = (Complex(0, -1) * w.step * h_eff).exp();
  (void)d;
  return w;
}

// One trajectory; on_step(step_index, psi) runs after every step when set.
inline TrajectoryRecord unravel_with_workspace(
    const LindbladModel& model, const Workspace& w, const Vector& psi0,
    double t_final, std::uint64_t seed,
    const UnravelOptions& options,
    const std::function<void(long, const Vector&)>* on_step = nullptr) {
  if (psi0.size() != model.space().total_dim()) {
    throw DimensionError("unravel: initial state has wrong dimension");
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-9) {
    throw InvalidArgumentError("unravel: initial state is not normalized");
  }

  TrajectoryRecord record;
  record.seed = seed;
  record.t_final = t_final;
  for (const auto& c : model.channels()) record.channel_tags.push_back(c.tag);

  RandomStream rng(seed);
  Vector psi = psi0 / psi0.norm();
  Vector scratch(psi.size());
  Eigen::VectorXd abs2(psi.size());
  std::vector<double> intensity(w.rates.size());

  for (long s = 0; s < w.n_steps; ++s) {
    // Channel intensities rate_c * <psi|L^dag L|psi> at the step start.
    abs2 = psi.cwiseAbs2();
    double total = 0.0;
    for (std::size_t c = 0; c < w.rates.size(); ++c) {
      double val;
      if (w.diag_weights[c].size() > 0) {
        val = w.diag_weights[c].dot(abs2);
      } else {
        scratch.noalias() = w.dense_weights[c] * psi;
        val = std::real(psi.dot(scratch));
      }
      intensity[c] = std::max(0.0, val);
      total += intensity[c];
    }

    const double jump_probability = total * w.step;
    if (jump_probability >= options.max_jump_probability) {
      throw SolverError(
          "unravel: jump probability per step " +
          std::to_string(jump_probability) + " at t = " +
          std::to_string(double(s) * w.step) +
          " exceeds " + std::to_string(options.max_jump_probability) +
          "; reduce dt");
    }

    const double u = rng.uniform01();
    if (u < jump_probability) {
      // Select the channel proportionally to its intensity.
      double pick = rng.uniform01() * total;
      std::size_t chosen = w.rates.size() - 1;
      for (std::size_t c = 0; c < w.rates.size(); ++c) {
        pick -= intensity[c];
        if (pick <= 0.0) {
          chosen = c;
          break;
        }
      }
      scratch.noalias() = w.jump_ops[chosen] * psi;
      psi.swap(scratch);
      record.events.push_back({double(s + 1) * w.step, w.channel_of[chosen]});
    } else {
      scratch.noalias() = w.u_eff * psi;
      psi.swap(scratch);
    }
    const double norm = psi.norm();
    if (!(norm > 1e-150)) {
      throw SolverError("unravel: state norm underflow at t = " +
                        std::to_string(double(s + 1) * w.step));
    }
    psi /= norm;
    if (on_step) (*on_step)(s + 1, psi);
  }

  record.final_state = std::move(psi);
  return record;
}

// Deterministic block-parallel map over trajectory indices: each worker
// fills its own slots, so the caller can reduce in index order.
inline void parallel_indices(int n, int n_threads,
                             const std::function<void(int)>& body) {
  if (n_threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < n_threads; ++t) {
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// Monte Carlo wavefunction unraveling: first-order per-step Bernoulli
// jump sampling with channel selection proportional to rate * <L^dag L>,
// exact non-Hermitian propagation between jumps. Deterministic in
// (model, psi0, t_final, seed).
inline TrajectoryRecord unravel_trajectory(const LindbladModel& model,
                                           const Vector& psi0, double t_final,
                                           std::uint64_t seed,
                                           const UnravelOptions& options = {}) {
  detail::Workspace w = detail::build_workspace(model, t_final, options);
  return detail::unravel_with_workspace(model, w, psi0, t_final, seed, options);
}

// Ensemble of trajectories with per-index derived seeds. Workers fill
// independent slots; the returned order is the index order.
inline std::vector<TrajectoryRecord> run_trajectories(
    const LindbladModel& model, const Vector& psi0, double t_final, int n_traj,
    std::uint64_t root_seed, const UnravelOptions& options = {},
    int n_threads = int(std::thread::hardware_concurrency())) {
  if (n_traj < 1) {
    throw InvalidArgumentError("run_trajectories: n_traj must be >= 1");
  }
  detail::Workspace w = detail::build_workspace(model, t_final, options);
  std::vector<TrajectoryRecord> records(static_cast<std::size_t>(n_traj));
  detail::parallel_indices(n_traj, n_threads, [&](int i) {
    records[std::size_t(i)] = detail::unravel_with_workspace(
        model, w, psi0, t_final, derive_stream_seed(root_seed, std::uint64_t(i)),
        options);
  });
  return records;
}

// Ensemble-averaged projector |psi><psi| at the requested times, with a
// per-entry Monte Carlo standard error (of the complex entry, combining
// real and imaginary scatter). Reduction runs in trajectory-index order.
struct EnsembleAverage {
  std::vector<double> times;                  // snapshot times actually used
  std::vector<Matrix> mean;                   // one per time
  std::vector<Eigen::MatrixXd> std_error;     // one per time
  int n_traj = 0;
};

inline EnsembleAverage ensemble_average(
    const LindbladModel& model, const Vector& psi0,
    const std::vector<double>& snapshot_times, double t_final, int n_traj,
    std::uint64_t root_seed, const UnravelOptions& options = {},
    int n_threads = int(std::thread::hardware_concurrency())) {
  if (n_traj < 2) {
    throw InvalidArgumentError("ensemble_average: n_traj must be >= 2");
  }
  detail::Workspace w = detail::build_workspace(model, t_final, options);

  // Snap each requested time onto the step grid.
  std::vector<long> snap_steps;
  EnsembleAverage out;
  for (double t : snapshot_times) {
    long s = std::min<long>(w.n_steps, std::max<long>(1, std::lround(t / w.step)));
    snap_steps.push_back(s);
    out.times.push_back(double(s) * w.step);
  }

  const int d = model.space().total_dim();
  const std::size_t n_snaps = snap_steps.size();
  std::vector<std::vector<Matrix>> slots(static_cast<std::size_t>(n_traj));

  detail::parallel_indices(n_traj, n_threads, [&](int i) {
    std::vector<Matrix>& mine = slots[std::size_t(i)];
    mine.assign(n_snaps, Matrix());
    std::function<void(long, const Vector&)> on_step =
        [&](long s, const Vector& psi) {
          for (std::size_t k = 0; k < n_snaps; ++k) {
            if (snap_steps[k] == s) mine[k] = psi * psi.adjoint();
          }
        };
    detail::unravel_with_workspace(model, w, psi0, t_final,
                                   derive_stream_seed(root_seed,
                                                      std::uint64_t(i)),
                                   options, &on_step);
  });

  // Welford accumulation, strictly in index order.
  std::vector<Matrix> mean(n_snaps, Matrix::Zero(d, d));
  std::vector<Eigen::MatrixXd> m2(n_snaps, Eigen::MatrixXd::Zero(d, d));
  for (int i = 0; i < n_traj; ++i) {
    const double count = double(i + 1);
    for (std::size_t k = 0; k < n_snaps; ++k) {
      const Matrix delta = slots[std::size_t(i)][k] - mean[k];
      mean[k] += delta / count;
      const Matrix delta2 = slots[std::size_t(i)][k] - mean[k];
      m2[k] += (delta.real().cwiseProduct(delta2.real()) +
                delta.imag().cwiseProduct(delta2.imag()))
                   .matrix();
    }
    slots[std::size_t(i)].clear();
  }

  out.n_traj = n_traj;
  for (std::size_t k = 0; k < n_snaps; ++k) {
    out.mean.push_back(mean[k]);
    out.std_error.push_back(
        (m2[k] / double(n_traj - 1) / double(n_traj)).cwiseSqrt());
  }
  return out;
}

// --- tick statistics ---------------------------------------------------------

struct TickStatistics {
  long n_ticks = 0;      // tagged events after the transient cut
  long n_intervals = 0;  // per-record consecutive pairs
  double t_bar = 0.0;    // mean inter-tick interval
  double delta_t = 0.0;  // unbiased standard deviation
  double resolution = 0.0;                  // 1 / t_bar
  std::optional<double> accuracy_n;         // (t_bar/delta_t)^2, unset if delta_t = 0
  std::optional<double> accuracy_std_error; // block estimate, unset if < 2 blocks
};

// Pools inter-tick intervals across records; intervals never straddle a
// record boundary, and events at or before transient_cut are dropped.
inline TickStatistics tick_statistics(
    const std::vector<TrajectoryRecord>& records, const std::string& tag,
    double transient_cut) {
  bool tag_known = false;
  std::vector<double> intervals;
  long n_ticks = 0;
  for (const auto& record : records) {
    tag_known = tag_known || record.has_tag(tag);
    double previous = -1.0;
    double last_time = -std::numeric_limits<double>::infinity();
    for (const auto& event : record.events) {
      if (event.time <= last_time) {
        throw InvariantError("tick_statistics: event times not increasing");
      }
      last_time = event.time;
      if (record.tag_of(event) != tag || event.time < transient_cut) continue;
      ++n_ticks;
      if (previous >= 0.0) intervals.push_back(event.time - previous);
      previous = event.time;
    }
  }
  if (!tag_known) {
    throw InvalidArgumentError("tick_statistics: tag '" + tag +
                               "' absent from all records");
  }
  if (intervals.size() < 2) {
    throw InvalidArgumentError(
        "tick_statistics: need at least 2 pooled intervals after the cut, got " +
        std::to_string(intervals.size()));
  }

  TickStatistics stats;
  stats.n_ticks = n_ticks;
  stats.n_intervals = long(intervals.size());
  double sum = 0.0;
  for (double x : intervals) sum += x;
  stats.t_bar = sum / double(intervals.size());
  double ss = 0.0;
  for (double x : intervals) ss += (x - stats.t_bar) * (x - stats.t_bar);
  stats.delta_t = std::sqrt(ss / double(intervals.size() - 1));
  stats.resolution = 1.0 / stats.t_bar;
  if (stats.delta_t > 0.0) {
    stats.accuracy_n =
        (stats.t_bar / stats.delta_t) * (stats.t_bar / stats.delta_t);

    // Standard error of the accuracy from disjoint interval blocks.
    const std::size_t n_blocks =
        std::min<std::size_t>(20, intervals.size() / 2);
    if (n_blocks >= 2) {
      std::vector<double> block_n;
      const std::size_t per = intervals.size() / n_blocks;
      for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::size_t lo = b * per;
        const std::size_t hi = (b + 1 == n_blocks) ? intervals.size()
                                                   : lo + per;
        double m = 0.0;
        for (std::size_t i = lo; i < hi; ++i) m += intervals[i];
        m /= double(hi - lo);
        double v = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          v += (intervals[i] - m) * (intervals[i] - m);
        }
        v /= double(hi - lo - 1);
        if (v > 0.0) block_n.push_back(m * m / v);
      }
      if (block_n.size() >= 2) {
        double bm = 0.0;
        for (double x : block_n) bm += x;
        bm /= double(block_n.size());
        double bv = 0.0;
        for (double x : block_n) bv += (x - bm) * (x - bm);
        bv /= double(block_n.size() - 1);
        stats.accuracy_std_error = std::sqrt(bv / double(block_n.size()));
      }
    }
  }
  return stats;
}

}  // namespace aqm::traj
