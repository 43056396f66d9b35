#include <cmath>
#include <variant>

#include <doctest.h>
#include <Eigen/Dense>

#include "logcave/error.hpp"
#include "logcave/oracle.hpp"
#include "logcave/tent.hpp"

using namespace logcave;

namespace {

SampleSet line(std::initializer_list<double> xs) {
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x});
  return SampleSet::from_rows(rows);
}

SampleSet unit_triangle() { return SampleSet::from_rows({{0, 0}, {1, 0}, {0, 1}}); }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

Eigen::VectorXd pt(std::initializer_list<double> v) { return vec(v); }

SampleSet random_set(int n, int d, Rng& rng) {
  for (;;) {
    Eigen::MatrixXd P(d, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < d; ++k) P(k, j) = rng.uniform(-1, 1);
    if (affine_rank(P) == d) return SampleSet(P);
  }
}

/// A point of the hull: a random convex combination of the samples.
Eigen::VectorXd hull_point(const SampleSet& X, Rng& rng) {
  Eigen::VectorXd w(X.size());
  for (int i = 0; i < X.size(); ++i) w(i) = -std::log(1 - rng.uniform());
  return X.points() * (w / w.sum());
}

}  // namespace

TEST_CASE("tent_evaluate examples") {
  const SampleSet X = line({0, 1});
  CHECK(*tent_evaluate(X, vec({0, 0}), pt({0.5})) == doctest::Approx(0.0));
  CHECK(*tent_evaluate(X, vec({1, -1}), pt({0.25})) == doctest::Approx(0.5));
  CHECK_FALSE(tent_evaluate(X, vec({0, 0}), pt({2.0})).has_value());
}

TEST_CASE("interior triangle value is the barycentric combination") {
  const SampleSet X = unit_triangle();
  Eigen::VectorXd y = vec({3, -1, -2});
  y.array() -= y.mean();
  const Eigen::VectorXd x = pt({0.2, 0.3});
  Eigen::Matrix3d M;
  M << 0, 1, 0, 0, 0, 1, 1, 1, 1;
  const Eigen::Vector3d lambda = M.fullPivLu().solve(Eigen::Vector3d(0.2, 0.3, 1.0));
  CHECK(*tent_evaluate(X, y, x) == doctest::Approx(lambda.dot(y)).epsilon(1e-12));
}

TEST_CASE("polyhedral_statistic examples") {
  const SampleSet seg = line({0, 1});
  const auto T = polyhedral_statistic(seg, vec({0.3, -0.3}), pt({0.25}));
  CHECK(T.weights(0) == doctest::Approx(0.75));
  CHECK(T.weights(1) == doctest::Approx(0.25));

  const auto C = polyhedral_statistic(unit_triangle(), vec({0.4, -0.1, -0.3}), pt({1.0 / 3, 1.0 / 3}));
  for (int i = 0; i < 3; ++i) CHECK(C.weights(i) == doctest::Approx(1.0 / 3));

  const SampleSet three = line({0, 0.5, 1});
  const auto F = polyhedral_statistic(three, vec({0, 0, 0}), pt({0.25}));
  CHECK(F.weights.sum() == doctest::Approx(1.0));
  CHECK(F.weights.minCoeff() >= -1e-12);
  CHECK((three.points() * F.weights)(0) == doctest::Approx(0.25));
  CHECK(F.value == doctest::Approx(0.0));
  CHECK(F.boundary);

  CHECK_THROWS_AS(polyhedral_statistic(seg, vec({0, 0}), pt({1.5})), OutsideHull);
}

TEST_CASE("membership_oracle examples") {
  const SampleSet X = line({0, 1});
  CHECK(membership_oracle(X, vec({0, 0}), 0.5, pt({0.5})));
  CHECK_FALSE(membership_oracle(X, vec({0, 0}), 0.5, pt({2.0})));
  CHECK_FALSE(membership_oracle(X, vec({1, -1}), 1.0, pt({0.75})));
  CHECK_THROWS_AS(membership_oracle(X, vec({0, 0}), 0.0, pt({0.5})), PreconditionViolation);
}

TEST_CASE("separation_oracle examples") {
  const SampleSet X = line({0, 1});
  const auto out = separation_oracle(X, vec({0, 0}), 0.5, pt({2.0}));
  REQUIRE(std::holds_alternative<Hyperplane>(out));
  const Hyperplane& H = std::get<Hyperplane>(out);
  CHECK(H.normal(0) == doctest::Approx(1.0));
  CHECK(H.excludes(pt({2.0})));
  CHECK_FALSE(H.excludes(pt({0.0})));
  CHECK_FALSE(H.excludes(pt({1.0})));

  CHECK(std::holds_alternative<Inside>(separation_oracle(X, vec({0, 0}), 0.5, pt({0.3}))));

  // {1 - 2x >= 0} is [0, 0.5].
  const auto cut = separation_oracle(X, vec({1, -1}), 1.0, pt({0.9}));
  REQUIRE(std::holds_alternative<Hyperplane>(cut));
  const Hyperplane& K = std::get<Hyperplane>(cut);
  CHECK(K.excludes(pt({0.9})));
  for (double t = 0.0; t <= 0.5; t += 0.01) CHECK_FALSE(K.excludes(pt({t})));

  CHECK_THROWS_AS(separation_oracle(X, vec({1, -1}), std::exp(1.5), pt({0.1})), DegenerateLevel);
}

TEST_CASE("d = 1 values match the upper envelope") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(7));
    const SampleSet X = random_set(n, 1, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = rng.uniform(-2, 2);
    const Eigen::VectorXd xs = X.points().row(0).transpose();
    const auto knots = upper_envelope_1d(xs, y);
    for (int q = 0; q < 20; ++q) {
      const double t = rng.uniform(X.lower()(0), X.upper()(0));
      CHECK(*tent_evaluate(X, y, pt({t})) == doctest::Approx(*envelope_value(knots, t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("tent invariants on random instances") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + static_cast<int>(rng.index(3));
    const int n = d + 1 + static_cast<int>(rng.index(5));
    const SampleSet X = random_set(n, d, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = rng.uniform(-2, 2);

    for (int i = 0; i < n; ++i) CHECK(*tent_evaluate(X, y, X.point(i)) >= y(i) - 1e-9);

    const Eigen::VectorXd a = hull_point(X, rng);
    const Eigen::VectorXd b = hull_point(X, rng);
    const double lambda = rng.uniform();
    const double mid = *tent_evaluate(X, y, lambda * a + (1 - lambda) * b);
    CHECK(mid >= lambda * *tent_evaluate(X, y, a) + (1 - lambda) * *tent_evaluate(X, y, b) - 1e-8);

    const double c = rng.uniform(-3, 3);
    const Eigen::VectorXd shifted = y.array() + c;
    CHECK(*tent_evaluate(X, shifted, a) == doctest::Approx(*tent_evaluate(X, y, a) + c).epsilon(1e-10));

    const auto T = polyhedral_statistic(X, y, a);
    CHECK((X.points() * T.weights - a).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(T.weights.dot(y) == doctest::Approx(*tent_evaluate(X, y, a)).epsilon(1e-10));

    const auto maj = supporting_affine(X, y, a);
    REQUIRE(maj.has_value());
    CHECK((*maj)(a) == doctest::Approx(*tent_evaluate(X, y, a)).epsilon(1e-9));
    for (int i = 0; i < n; ++i) CHECK((*maj)(X.point(i)) >= y(i) - 1e-9);
  }
}

TEST_CASE("separation never cuts off a pole of the superlevel set") {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + static_cast<int>(rng.index(2));
    const int n = d + 2 + static_cast<int>(rng.index(4));
    const SampleSet X = random_set(n, d, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = rng.uniform(-2, 2);
    const double logLevel = y.maxCoeff() - rng.uniform(0.1, 2.0);
    for (int q = 0; q < 10; ++q) {
      Eigen::VectorXd x(d);
      for (int k = 0; k < d; ++k) x(k) = rng.uniform(-1.5, 1.5);
      const auto s = separation_oracle_log(X, y, logLevel, x, 0.05);
      if (std::holds_alternative<Inside>(s)) {
        CHECK(in_superlevel(X, y, logLevel, x));
        continue;
      }
      const Hyperplane& H = std::get<Hyperplane>(s);
      CHECK(H.excludes(x));
      for (int i = 0; i < n; ++i) {
        if (y(i) >= logLevel) CHECK_FALSE(H.excludes(X.point(i)));
      }
    }
  }
}

TEST_CASE("superlevel chord on a segment tent") {
  const SampleSet X = line({0, 1});
  const auto t = superlevel_chord(X, vec({1, -1}), 0.0, pt({0.1}), pt({1.0}));
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(0.4));
  CHECK_FALSE(superlevel_chord(X, vec({1, -1}), 0.0, pt({0.8}), pt({1.0})).has_value());
}

TEST_CASE("batch evaluation matches pointwise") {
  Rng rng(3);
  const SampleSet X = random_set(8, 2, rng);
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) y(i) = rng.uniform(-1, 1);
  Eigen::MatrixXd Q(2, 40);
  for (int j = 0; j < 40; ++j) Q.col(j) = Eigen::Vector2d(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));
  const auto serial = tent_evaluate_batch(X, y, Q, Execution::Serial);
  const auto parallel = tent_evaluate_batch(X, y, Q, Execution::Parallel);
  CHECK(serial == parallel);
  for (int j = 0; j < 40; ++j) CHECK(serial[static_cast<std::size_t>(j)] == tent_evaluate(X, y, Q.col(j)));
}
