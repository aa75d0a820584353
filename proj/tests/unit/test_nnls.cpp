#include <doctest.h>

#include <random>

#include "codap/error.hpp"
#include "codap/nnls.hpp"

using namespace codap;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("identity system clamps the data") {
  VectorXd b(4);
  b << 1.5, -2.0, 0.0, 3.0;
  auto r = solve_nnls(MatrixXd::Identity(4, 4), b);
  CHECK(r.x(0) == doctest::Approx(1.5));
  CHECK(r.x(1) == 0.0);
  CHECK(r.x(2) == 0.0);
  CHECK(r.x(3) == doctest::Approx(3.0));
}

TEST_CASE("data opposite to every column gives zero") {
  MatrixXd a(3, 2);
  a << 1, 0, 1, 1, 0, 1;
  VectorXd b = -a * VectorXd::Ones(2);
  auto r = solve_nnls(a, b);
  CHECK(r.x.isZero());
  CHECK(r.objective == doctest::Approx(b.squaredNorm()));
}

TEST_CASE("invertible system with positive solution matches a direct solve") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(gen() % 10);
    MatrixXd a = MatrixXd::Identity(n, n) * 2.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) += u(gen);
    VectorXd truth(n);
    for (int i = 0; i < n; ++i) truth(i) = 0.5 + u(gen);
    VectorXd b = a * truth;
    VectorXd direct = a.fullPivLu().solve(b);
    auto r = solve_nnls(a, b);
    CHECK((r.x - direct).norm() <= 1e-6 * direct.norm());
  }
}

TEST_CASE("KKT conditions on random problems") {
  std::mt19937 gen(17);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int m = 1 + static_cast<int>(gen() % 20), n = 1 + static_cast<int>(gen() % 20);
    MatrixXd a(m, n);
    VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      b(i) = g(gen);
      for (int j = 0; j < n; ++j) a(i, j) = g(gen);
    }
    auto r = solve_nnls(a, b);
    VectorXd w = a.transpose() * (b - a * r.x);
    double scale = 1.0 + a.norm() * b.norm();
    for (int j = 0; j < n; ++j) {
      REQUIRE(r.x(j) >= 0.0);
      CHECK(w(j) <= 1e-8 * scale);
      CHECK(std::abs(r.x(j) * w(j)) <= 1e-8 * scale);
    }
    // Never worse than clamping the unconstrained solution.
    VectorXd ls = a.completeOrthogonalDecomposition().solve(b).cwiseMax(0.0);
    CHECK(r.objective <= (a * ls - b).squaredNorm() + 1e-10);
  }
}

TEST_CASE("iteration cap reports the best iterate") {
  MatrixXd a = MatrixXd::Identity(5, 5);
  VectorXd b = VectorXd::Ones(5);
  NnlsOptions opts;
  opts.max_iterations = 1;
  try {
    solve_nnls(a, b, opts);
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(e.best_iterate().size() == 5);
  }
}

TEST_CASE("shape mismatch") {
  CHECK_THROWS_AS(solve_nnls(MatrixXd::Identity(3, 3), VectorXd::Ones(2)), ParameterError);
}
