#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "aqm/dynamics.hpp"
#include "helpers.hpp"

using namespace aqm;
using namespace aqm::dynamics;
using Catch::Approx;

namespace {

DensityMatrix plus_state() {
  Eigen::VectorXcd plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return DensityMatrix::pure(HilbertSpace::qubit(), plus);
}

}  // namespace

TEST_CASE("closed-qubit coherence rotates at the level splitting",
          "[dynamics]") {
  const double delta = 0.9;
  HilbertSpace q = HilbertSpace::qubit();
  LindbladModel model(q, delta * sigma_z(), {});

  EvolveOptions opt;
  opt.snapshot_stride = 50;
  EvolveResult series = evolve(model, plus_state(), 2.0, 1e-3, opt);

  for (const auto& [t, state] : series.states) {
    // Independent oracle: direct unitary conjugation by the exponential.
    Matrix u = (Complex(0, -1) * t * (delta * sigma_z()).matrix()).exp();
    Matrix expected = u * plus_state().matrix() * u.adjoint();
    CHECK((state.matrix() - expected).cwiseAbs().maxCoeff() < 1e-9);
    // The off-diagonal element oscillates at the full splitting 2*Delta.
    CHECK(std::abs(state.entry(0, 1)) == Approx(0.5).margin(1e-9));
    CHECK(std::arg(state.entry(0, 1)) ==
          Approx(std::remainder(2.0 * delta * t, 2.0 * M_PI)).margin(1e-7));
  }
}

TEST_CASE("decay-only qubit relaxes exponentially", "[dynamics]") {
  const double gamma = 1.0;
  HilbertSpace q = HilbertSpace::qubit();
  LindbladModel model(q, Operator::zero(q), {{sigma_minus(), gamma, "b"}});

  DensityMatrix excited = DensityMatrix::basis_state(q, 1);
  EvolveOptions opt;
  opt.snapshot_stride = 100;
  EvolveResult series = evolve(model, excited, 3.0, 1e-3 / gamma, opt);
  for (const auto& [t, state] : series.states) {
    CHECK(state.entry(1, 1).real() == Approx(std::exp(-gamma * t)).margin(1e-8));
  }
}

TEST_CASE("a steady initial state stays put", "[dynamics]") {
  HilbertSpace q = HilbertSpace::qubit();
  Operator h = 1.0 * sigma_z();
  Temperature t_bath(1.5);
  LindbladModel model(q, h,
                      thermal_channels(sigma_minus(), 2.0, t_bath, 0.2, "b"));
  DensityMatrix thermal = thermal_state(h, t_bath);

  EvolveResult series = evolve(model, thermal, 10.0, 0.01);
  for (const auto& [t, state] : series.states) {
    CHECK((state.matrix() - thermal.matrix()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("step-size check distinguishes strict and lenient modes",
          "[dynamics][errors]") {
  HilbertSpace q = HilbertSpace::qubit();
  LindbladModel model(q, 50.0 * sigma_z(), {});
  DensityMatrix rho = plus_state();

  EvolveOptions strict;
  CHECK_THROWS_AS(evolve(model, rho, 0.1, 0.01, strict), SolverError);

  EvolveOptions lenient;
  lenient.strict_step_check = false;
  lenient.validate_states = false;
  EvolveResult r = evolve(model, rho, 0.1, 0.01, lenient);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("step-halving convergence check reports the error", "[dynamics]") {
  HilbertSpace q = HilbertSpace::qubit();
  LindbladModel model(
      q, 1.0 * sigma_z(),
      thermal_channels(sigma_minus(), 2.0, Temperature(2.0), 0.3, "b"));
  EvolveOptions opt;
  opt.convergence_check = true;
  EvolveResult r = evolve(model, plus_state(), 5.0, 0.01, opt);
  REQUIRE(r.convergence_error.has_value());
  CHECK(*r.convergence_error < 1e-6);
}

TEST_CASE("evolve rejects bad arguments", "[dynamics][errors]") {
  HilbertSpace q = HilbertSpace::qubit();
  LindbladModel model(q, 1.0 * sigma_z(), {});
  CHECK_THROWS_AS(evolve(model, plus_state(), 1.0, 0.0), InvalidArgumentError);
  CHECK_THROWS_AS(
      evolve(model, DensityMatrix::maximally_mixed(HilbertSpace({3})), 1.0,
             0.01),
      DimensionError);
}

TEST_CASE("steady state of a thermal qubit is the thermal state",
          "[dynamics]") {
  const double delta = 0.8;
  HilbertSpace q = HilbertSpace::qubit();
  Operator h = delta * sigma_z();
  Temperature t_bath(2.3);
  LindbladModel model(
      q, h, thermal_channels(sigma_minus(), 2.0 * delta, t_bath, 0.15, "b"));

  DensityMatrix ss = steady_state(model);
  DensityMatrix thermal = thermal_state(h, t_bath);
  CHECK((ss.matrix() - thermal.matrix()).cwiseAbs().maxCoeff() < 1e-8);

  // And the generator annihilates it.
  CHECK(liouvillian_apply(model, ss).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("unitary-only models have a degenerate null space",
          "[dynamics][errors]") {
  HilbertSpace q = HilbertSpace::qubit();
  LindbladModel model(q, 1.0 * sigma_z(), {});
  CHECK_THROWS_AS(steady_state(model), SolverError);
}

TEST_CASE("steady state agrees with long-time integration",
          "[dynamics][property]") {
  // Two-bath qubit: null-space route vs integration route.
  HilbertSpace q = HilbertSpace::qubit();
  Operator h = 1.0 * sigma_z();
  std::vector<JumpChannel> channels =
      thermal_channels(sigma_minus(), 2.0, Temperature(5.0), 0.3, "hot");
  auto cold =
      thermal_channels(sigma_minus(), 2.0, Temperature(1.0), 0.3, "cold");
  channels.insert(channels.end(), cold.begin(), cold.end());
  LindbladModel model(q, h, channels);

  DensityMatrix ss = steady_state(model);
  EvolveOptions opt;
  opt.snapshot_stride = 1 << 20;  // keep only endpoints
  EvolveResult series =
      evolve(model, DensityMatrix::basis_state(q, 1), 120.0, 0.01, opt);
  CHECK((series.final_state().matrix() - ss.matrix()).cwiseAbs().maxCoeff() <
        1e-6);
}
