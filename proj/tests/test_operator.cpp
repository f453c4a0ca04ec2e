#include <catch2/catch_amalgamated.hpp>

#include "aqm/operator.hpp"
#include "aqm/states.hpp"
#include "helpers.hpp"

using namespace aqm;
using aqm_test::random_density;
using aqm_test::random_matrix;
using Catch::Approx;

TEST_CASE("HilbertSpace validates dimensions", "[hilbert]") {
  HilbertSpace s({2, 3, 2});
  CHECK(s.total_dim() == 12);
  CHECK(s.n_subsystems() == 3);
  CHECK_THROWS_AS(HilbertSpace({2, 1}), DimensionError);
  CHECK_THROWS_AS(HilbertSpace({}), DimensionError);
  CHECK_THROWS_AS(HilbertSpace({16, 17}), DimensionError);  // 272 > 256 cap
  CHECK_NOTHROW(HilbertSpace({16, 17}, 512));
}

TEST_CASE("basis convention: index 1 is the +1 eigenstate of sigma_z",
          "[operator]") {
  Operator sz = sigma_z();
  Eigen::VectorXcd ket0 = Eigen::VectorXcd::Zero(2), ket1 = ket0;
  ket0(0) = 1.0;
  ket1(1) = 1.0;
  CHECK((sz.matrix() * ket0 + ket0).norm() == Approx(0.0).margin(1e-15));
  CHECK((sz.matrix() * ket1 - ket1).norm() == Approx(0.0).margin(1e-15));
  CHECK((sigma_plus().matrix() * ket0 - ket1).norm() ==
        Approx(0.0).margin(1e-15));
}

TEST_CASE("embed on a single-subsystem space is the identity map",
          "[operator]") {
  Operator sz = sigma_z();
  Operator e = embed(sz, HilbertSpace({2}), 0);
  CHECK((e.matrix() - sz.matrix()).norm() == Approx(0.0).margin(1e-15));
}

TEST_CASE("embed places the operator on the requested subsystem",
          "[operator]") {
  HilbertSpace two_qubits({2, 2});
  Operator e0 = embed(sigma_z(), two_qubits, 0);
  // |1>|0> has index 2; subsystem 0 is excited, so eigenvalue +1.
  Eigen::VectorXcd ket10 = Eigen::VectorXcd::Zero(4);
  ket10(2) = 1.0;
  CHECK((e0.matrix() * ket10 - ket10).norm() == Approx(0.0).margin(1e-15));

  Operator e1 = embed(sigma_z(), two_qubits, 1);
  CHECK((e1.matrix() * ket10 + ket10).norm() == Approx(0.0).margin(1e-15));
}

TEST_CASE("disjoint embeddings commute", "[operator][property]") {
  std::mt19937_64 rng(71);
  HilbertSpace space({2, 3});
  for (int trial = 0; trial < 20; ++trial) {
    Operator a(HilbertSpace({3}), random_matrix(3, rng));
    Operator b(HilbertSpace({2}), random_matrix(2, rng));
    Operator ea = embed(a, space, 1);
    Operator eb = embed(b, space, 0);
    CHECK((ea * eb - eb * ea).max_abs() == Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("embed preserves Hermiticity and spectrum multiplicity",
          "[operator][property]") {
  std::mt19937_64 rng(72);
  HilbertSpace space({2, 2, 3});
  Eigen::MatrixXcd h = random_matrix(2, rng);
  h = (h + h.adjoint()).eval();
  Operator op(HilbertSpace({2}), h);
  Operator e = embed(op, space, 1);
  REQUIRE(e.is_hermitian(1e-12));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> small(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> big(e.matrix());
  // Each eigenvalue of op appears with multiplicity 6 (= 2*3).
  std::vector<double> expected;
  for (int i = 0; i < 2; ++i) {
    for (int copies = 0; copies < 6; ++copies) {
      expected.push_back(small.eigenvalues()(i));
    }
  }
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 12; ++i) {
    CHECK(big.eigenvalues()(i) == Approx(expected[std::size_t(i)]).margin(1e-10));
  }
}

TEST_CASE("embed rejects bad arguments", "[operator][errors]") {
  HilbertSpace space({2, 3});
  CHECK_THROWS_AS(embed(sigma_z(), space, 1), DimensionError);
  CHECK_THROWS_AS(embed(sigma_z(), space, 2), DimensionError);
}

TEST_CASE("partial trace of a product state factorizes", "[operator]") {
  std::mt19937_64 rng(73);
  HilbertSpace a({2}), b({3});
  DensityMatrix rho_a = random_density(a, rng);
  DensityMatrix rho_b = random_density(b, rng);
  DensityMatrix joint = tensor(rho_a, rho_b);

  DensityMatrix back_a = partial_trace(joint, {0});
  DensityMatrix back_b = partial_trace(joint, {1});
  CHECK((back_a.matrix() - rho_a.matrix()).cwiseAbs().maxCoeff() ==
        Approx(0.0).margin(1e-12));
  CHECK((back_b.matrix() - rho_b.matrix()).cwiseAbs().maxCoeff() ==
        Approx(0.0).margin(1e-12));
}

TEST_CASE("partial trace of a Bell state is maximally mixed", "[operator]") {
  HilbertSpace pair({2, 2});
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  DensityMatrix rho = DensityMatrix::pure(pair, bell);
  DensityMatrix reduced = partial_trace(rho, {0});
  CHECK((reduced.matrix() - 0.5 * Eigen::MatrixXcd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() == Approx(0.0).margin(1e-12));
}

TEST_CASE("partial trace preserves the trace", "[operator][property]") {
  std::mt19937_64 rng(74);
  HilbertSpace space({2, 2, 3});
  for (int trial = 0; trial < 100; ++trial) {
    DensityMatrix rho = random_density(space, rng);
    DensityMatrix r1 = partial_trace(rho, {1});
    DensityMatrix r2 = partial_trace(rho, {0, 2});
    CHECK(std::abs(r1.matrix().trace() - Complex(1.0)) < 1e-12);
    CHECK(std::abs(r2.matrix().trace() - Complex(1.0)) < 1e-12);
  }
}

TEST_CASE("partial trace over a middle subsystem matches the kron oracle",
          "[operator]") {
  std::mt19937_64 rng(75);
  HilbertSpace a({2}), b({3}), c({2});
  DensityMatrix ra = random_density(a, rng);
  DensityMatrix rb = random_density(b, rng);
  DensityMatrix rc = random_density(c, rng);
  DensityMatrix joint = tensor(tensor(ra, rb), rc);
  DensityMatrix kept = partial_trace(joint, {0, 2});
  DensityMatrix expected = tensor(ra, rc);
  CHECK((kept.matrix() - expected.matrix()).cwiseAbs().maxCoeff() ==
        Approx(0.0).margin(1e-12));
}

TEST_CASE("partial trace rejects bad keep sets", "[operator][errors]") {
  std::mt19937_64 rng(76);
  DensityMatrix rho = random_density(HilbertSpace({2, 2}), rng);
  CHECK_THROWS_AS(partial_trace(rho, {}), DimensionError);
  CHECK_THROWS_AS(partial_trace(rho, {2}), DimensionError);
}

TEST_CASE("operator arithmetic demands matching spaces", "[operator][errors]") {
  Operator a = Operator::identity(HilbertSpace({2}));
  Operator b = Operator::identity(HilbertSpace({3}));
  CHECK_THROWS_AS(a + b, DimensionError);
  CHECK_THROWS_AS(a * b, DimensionError);
}
