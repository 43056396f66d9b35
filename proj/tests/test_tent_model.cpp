#include <cmath>

#include <doctest.h>

#include "logcave/error.hpp"
#include "logcave/oracle.hpp"
#include "logcave/sampler.hpp"
#include "logcave/tent_model.hpp"
#include "support.hpp"

using namespace logcave;
using testing::line;
using testing::vec;

TEST_CASE("tent params must sum to zero") {
  CHECK_NOTHROW(TentParams(vec({1, -1})));
  CHECK_THROWS_AS(TentParams(vec({1, 1})), PreconditionViolation);
  CHECK_THROWS_AS(TentParams(vec({NAN, 0})), PreconditionViolation);
  CHECK(TentParams::normalized(vec({3, 1})).values().isApprox(vec({1, -1})));
}

TEST_CASE("density of the uniform tent on [0, 1]") {
  TentDensity td(line({0, 1}), TentParams::zero(2));
  const double delta = 0.02;
  for (double x : {0.0, 0.3, 1.0}) CHECK(std::abs(tent_density_value(td, vec({x}), delta, 0.05) - 1.0) <= 3 * delta);
  CHECK(tent_density_value(td, vec({2.0}), delta, 0.05) == 0.0);
  REQUIRE(td.cached().has_value());
  CHECK(td.cached()->delta == delta);
}

TEST_CASE("density of the segment tent at its apex") {
  TentDensity td(line({0, 1}), TentParams(vec({1, -1})));
  const double delta = 0.02;
  const double exact = std::exp(1.0 - exact_partition_1d(vec({0, 1}), vec({1, -1})));
  CHECK(exact == doctest::Approx(2.313).epsilon(1e-3));
  CHECK(std::abs(tent_density_value(td, vec({0.0}), delta, 0.05) / exact - 1.0) <= 3 * delta);
}

TEST_CASE("objective value") {
  const SampleSet X = line({0, 1});
  const auto uniform = objective_value(X, vec({0, 0}), 0.0);
  CHECK(uniform.surrogate == 0.0);
  CHECK(uniform.loglik == 0.0);

  const double A = exact_partition_1d(vec({0, 1}), vec({1, -1}));
  CHECK(A == doctest::Approx(0.161439).epsilon(1e-5));
  const auto seg = objective_value(X, vec({1, -1}), A);
  CHECK(seg.loglik == doctest::Approx(-0.32288).epsilon(1e-4));

  // Before normalization the shift moves A by the same amount.
  const Eigen::VectorXd shifted = vec({1.7, -0.3});
  const double As = exact_partition_1d(vec({0, 1}), shifted);
  CHECK(objective_value(X, shifted, As).loglik == doctest::Approx(seg.loglik).epsilon(1e-12));
}

TEST_CASE("stochastic subgradient") {
  const SampleSet X = line({0, 1});
  const Eigen::VectorXd g = stochastic_subgradient(X, vec({0, 0}), vec({0.25}));
  CHECK(g(0) == doctest::Approx(-0.25));
  CHECK(g(1) == doctest::Approx(0.25));
  CHECK_THROWS_AS(stochastic_subgradient(X, vec({0, 0}), vec({1.5})), OutsideHull);
}

TEST_CASE("subgradients are bounded and average to zero on the simplex") {
  const SampleSet X = SampleSet::from_rows({{0, 0}, {1, 0}, {0, 1}});
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
  SamplerConfig cfg;
  cfg.delta = 0.05;
  cfg.walkSteps = 10;
  Rng rng(3);
  auto dec = build_decomposition(X, y, cfg, rng);
  TentSampler sampler(X, y, std::move(dec), cfg, rng.split(1));
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  const int draws = 3000;
  for (int i = 0; i < draws; ++i) {
    const Eigen::VectorXd g = stochastic_subgradient(X, y, sampler.draw());
    CHECK(g.norm() <= 1 + 1 / std::sqrt(3.0) + 1e-12);
    mean += g;
  }
  mean /= draws;
  // Each coordinate of T is a barycentric weight with variance 1/18 under the uniform law.
  const double sigma = std::sqrt(1.0 / 18.0 / draws);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean(i)) <= 4 * sigma + cfg.delta);
}

TEST_CASE("A is convex along random segments") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(4));
    const auto xs = testing::random_abscissae(n, rng);
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xs.data(), n);
    Eigen::VectorXd a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a(i) = rng.uniform(-2, 2);
      b(i) = rng.uniform(-2, 2);
    }
    const double t = rng.uniform();
    CHECK(exact_partition_1d(x, t * a + (1 - t) * b) <=
          t * exact_partition_1d(x, a) + (1 - t) * exact_partition_1d(x, b) + 1e-10);
  }
}
