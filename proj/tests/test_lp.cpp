#include <doctest.h>

#include "logcave/error.hpp"
#include "logcave/lp.hpp"
#include "logcave/rng.hpp"

using namespace logcave;

namespace {

LpProblem problem(Eigen::VectorXd c, Eigen::MatrixXd A, Eigen::VectorXd b, std::vector<RowSense> s,
                  bool maximize = true) {
  return LpProblem{std::move(c), std::move(A), std::move(b), std::move(s), maximize};
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

}  // namespace

TEST_CASE("one-variable box") {
  Eigen::MatrixXd A(1, 1);
  A << 1;
  const auto s = solve_lp(problem(vec({1}), A, vec({1}), {RowSense::LessEqual}));
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.primal(0) == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(1.0));
}

TEST_CASE("simplex face has objective 1") {
  Eigen::MatrixXd A(1, 2);
  A << 1, 1;
  const auto s = solve_lp(problem(vec({1, 1}), A, vec({1}), {RowSense::LessEqual}));
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0));
  CHECK(s.alternativeOptima);
}

TEST_CASE("empty polytope is infeasible with a Farkas ray") {
  Eigen::MatrixXd A(2, 1);
  A << 1, 1;
  const auto s = solve_lp(problem(vec({1}), A, vec({0, 1}), {RowSense::LessEqual, RowSense::GreaterEqual}));
  REQUIRE(s.status == LpStatus::Infeasible);
  CHECK((A.transpose() * s.dual)(0) >= -1e-12);
  CHECK(vec({0, 1}).dot(s.dual) < 0);
}

TEST_CASE("unbounded objective") {
  Eigen::MatrixXd A(1, 2);
  A << 1, -1;
  const auto s = solve_lp(problem(vec({1, 0}), A, vec({1}), {RowSense::LessEqual}));
  CHECK(s.status == LpStatus::Unbounded);
}

TEST_CASE("minimization with equality and negative right-hand side") {
  // min x + 2y  s.t.  x - y = -1, x + y >= 3  ->  x = 1, y = 2, value 5
  Eigen::MatrixXd A(2, 2);
  A << 1, -1, 1, 1;
  const auto s = solve_lp(problem(vec({1, 2}), A, vec({-1, 3}), {RowSense::Equal, RowSense::GreaterEqual}, false));
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(5.0));
  CHECK(s.primal(0) == doctest::Approx(1.0));
  CHECK(s.primal(1) == doctest::Approx(2.0));
}

TEST_CASE("strong duality on random feasible LPs") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng.index(5));
    const int n = 2 + static_cast<int>(rng.index(6));
    Eigen::MatrixXd A(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(0.1, 2.0);
    Eigen::VectorXd b(m), c(n);
    for (int i = 0; i < m; ++i) b(i) = rng.uniform(0.5, 3.0);
    for (int j = 0; j < n; ++j) c(j) = rng.uniform(-1.0, 2.0);
    const auto s = solve_lp(problem(c, A, b, std::vector<RowSense>(m, RowSense::LessEqual)));
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(b.dot(s.dual)).epsilon(1e-9));
    CHECK((A * s.primal - b).maxCoeff() <= 1e-9);
    CHECK(s.primal.minCoeff() >= -1e-12);
    // dual feasibility for max / <= : y >= 0, A^T y >= c
    CHECK(s.dual.minCoeff() >= -1e-9);
    CHECK((A.transpose() * s.dual - c).minCoeff() >= -1e-9);
  }
}

TEST_CASE("degenerate vertex does not cycle") {
  // Beale's example, which cycles under textbook Dantzig pricing.
  Eigen::MatrixXd A(3, 4);
  A << 0.25, -60, -1.0 / 25, 9, 0.5, -90, -1.0 / 50, 3, 0, 0, 1, 0;
  const auto s = solve_lp(problem(vec({0.75, -150, 1.0 / 50, -6}), A, vec({0, 0, 1}),
                                  std::vector<RowSense>(3, RowSense::LessEqual)));
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(0.05));
}

TEST_CASE("deterministic") {
  Eigen::MatrixXd A(2, 3);
  A << 1, 1, 1, 1, -1, 2;
  const auto p = problem(vec({1, 1, 1}), A, vec({1, 0.5}), {RowSense::Equal, RowSense::LessEqual});
  const auto a = solve_lp(p);
  const auto b = solve_lp(p);
  CHECK(a.primal == b.primal);
  CHECK(a.dual == b.dual);
}
