#include <cmath>

#include <doctest.h>

#include "logcave/error.hpp"
#include "logcave/sampler.hpp"
#include "logcave/tent.hpp"
#include "support.hpp"

using namespace logcave;
using testing::line;
using testing::vec;

namespace {

SamplerConfig config(double delta, int walkSteps = 0) {
  SamplerConfig cfg;
  cfg.delta = delta;
  cfg.walkSteps = walkSteps;
  return cfg;
}

}  // namespace

TEST_CASE("level count") {
  CHECK(level_count(vec({0, 0})) == 1);
  CHECK(level_count(vec({2, -2, 0})) == 5);
  CHECK(level_count(vec({1, -1})) == 3);
}

TEST_CASE("decomposition of the zero tent on [0, 1]") {
  const SampleSet X = line({0, 1});
  Rng rng(1);
  const auto dec = build_decomposition(X, vec({0, 0}), config(0.05), rng);
  CHECK(dec.m == 1);
  CHECK(dec.volumes[0] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(dec.logMax == doctest::Approx(0.0));
}

TEST_CASE("decomposition of the segment tent") {
  const SampleSet X = line({0, 1});
  Rng rng(1);
  const auto dec = build_decomposition(X, vec({1, -1}), config(0.05), rng);
  CHECK(dec.apex == 0);
  CHECK(dec.logMax == doctest::Approx(1.0));
  CHECK(dec.volumes[0] == doctest::Approx(std::log(2.0) / 2.0).epsilon(0.05));

  double total = 0;
  for (double w : dec.weights) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  const int m = dec.m;
  const double last = 2.0 * std::ldexp(dec.volumes[m - 1], -m) / dec.normalizer;
  CHECK(dec.weights[m - 1] == doctest::Approx(last).epsilon(1e-12));
  for (int i = 1; i < m; ++i) CHECK(dec.volumes[i] >= dec.volumes[i - 1]);
}

TEST_CASE("superlevel sets are nested") {
  Rng rng(2);
  const SampleSet X = SampleSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.4, 0.7}});
  const Eigen::VectorXd y = vec({0.5, -1, 0.2, -0.6, 0.9});
  const double M = tent_log_max(y);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Vector2d x(rng.uniform(-0.1, 1.1), rng.uniform(-0.1, 1.1));
    for (int i = 1; i < 4; ++i) {
      if (in_superlevel(X, y, M - i * std::log(2.0), x)) CHECK(in_superlevel(X, y, M - (i + 1) * std::log(2.0), x));
    }
  }
}

TEST_CASE("uniform sample on a level interval") {
  const SampleSet X = line({0, 1});
  const Eigen::VectorXd y = vec({1, -1});
  const TentLevelSet L1(X, y, 1.0 - std::log(2.0), Ball{vec({0.1}), 0.05});
  Rng rng(3);
  const int draws = 10000;
  double mean = 0;
  for (int i = 0; i < draws; ++i) mean += uniform_sample(L1, config(0.05), rng)(0);
  mean /= draws;
  const double half = std::log(2.0) / 2.0;
  const double sigma = half / std::sqrt(12.0 * draws);
  CHECK(std::abs(mean - half / 2.0) < 3 * sigma);
}

TEST_CASE("uniform sample on the unit square as a level set") {
  const SampleSet X = SampleSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  const TentLevelSet sq(X, vec({0, 0, 0, 0}), std::log(0.5), Ball{vec({0.5, 0.5}), 0.5});
  Rng rng(4);
  const int draws = 2000;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (int i = 0; i < draws; ++i) mean += uniform_sample(sq, config(0.05, 20), rng);
  mean /= draws;
  const double sigma = 1.0 / std::sqrt(12.0 * draws);
  CHECK(std::abs(mean(0) - 0.5) < 3 * sigma);
  CHECK(std::abs(mean(1) - 0.5) < 3 * sigma);
}

TEST_CASE("level at the maximum is a single point") {
  const SampleSet X = SampleSet::from_rows({{0, 0}, {1, 0}, {0, 1}});
  const Eigen::VectorXd y = vec({1, -0.5, -0.5});
  const TentLevelSet top(X, y, 1.0, Ball{vec({0, 0}), 0.0});
  Rng rng(5);
  try {
    const Eigen::VectorXd z = uniform_sample(top, config(0.05, 10), rng);
    CHECK(z.norm() <= 1e-9);
  } catch (const WalkStuck&) {
    CHECK(true);
  }
}

TEST_CASE("zero tent draws are uniform on [0, 1]") {
  const SampleSet X = line({0, 1});
  Rng rng(6);
  auto dec = build_decomposition(X, vec({0, 0}), config(0.01), rng);
  TentSampler sampler(X, vec({0, 0}), std::move(dec), config(0.01), rng.split(1));
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i) xs.push_back(sampler.draw()(0));
  const double D = testing::ks_statistic(xs, [](double t) { return std::clamp(t, 0.0, 1.0); });
  CHECK(D <= testing::ks_critical_1pct(xs.size()) + 0.01);
}

TEST_CASE("segment tent draws follow the closed-form CDF") {
  const SampleSet X = line({0, 1});
  const Eigen::VectorXd y = vec({1, -1});
  Rng rng(7);
  auto dec = build_decomposition(X, y, config(0.01), rng);
  TentSampler sampler(X, y, std::move(dec), config(0.01), rng.split(1));
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i) xs.push_back(sampler.draw()(0));
  CHECK(testing::ks_statistic(xs, testing::segment_tent_cdf) <= testing::ks_critical_1pct(xs.size()) + 0.01);
  const double n = static_cast<double>(sampler.proposals());
  CHECK(sampler.acceptance_rate() >= 0.5 - 3 * std::sqrt(0.25 / n));
}

TEST_CASE("every proposal satisfies the sandwich") {
  const SampleSet X = SampleSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {0.6, 0.6}});
  const Eigen::VectorXd y = vec({0.8, -0.4, 0.3, -0.7});
  Rng rng(8);
  const SamplerConfig cfg = config(0.05, 10);
  auto dec = build_decomposition(X, y, cfg, rng);
  TentSampler sampler(X, y, std::move(dec), cfg, rng.split(1));
  for (int i = 0; i < 300; ++i) {
    const auto p = sampler.propose();
    CHECK(p.ratio >= 0.5);
    CHECK(p.ratio <= 1.0);
    CHECK(*tent_evaluate(X, y, p.point) == doctest::Approx(p.logH).epsilon(1e-9));
  }
}

TEST_CASE("log-partition examples") {
  Rng rng(9);
  const double delta = 0.02;
  const auto zero = estimate_log_partition(line({0, 1}), vec({0, 0}), config(delta), rng);
  CHECK(std::abs(zero.logPartition) <= std::log1p(3 * delta));

  const auto seg = estimate_log_partition(line({0, 1}), vec({1, -1}), config(delta), rng);
  CHECK(std::abs(seg.logPartition - testing::segment_tent_log_partition()) <= std::log1p(3 * delta));
  CHECK(seg.trials == partition_trials(delta, 0.05));

  const SampleSet tri = SampleSet::from_rows({{0, 0}, {1, 0}, {0, 1}});
  const auto simplex = estimate_log_partition(tri, vec({0, 0, 0}), config(0.05, 10), rng);
  CHECK(std::abs(simplex.logPartition - std::log(0.5)) <= std::log1p(3 * 0.05));
}

TEST_CASE("log-partition needs delta below 1/16") {
  Rng rng(1);
  CHECK_THROWS_AS(estimate_log_partition(line({0, 1}), vec({0, 0}), config(0.07), rng), PreconditionViolation);
}

TEST_CASE("same seed, same stream; execution policy does not matter") {
  const SampleSet X = line({0, 0.3, 1});
  const Eigen::VectorXd y = vec({0.4, 0.1, -0.5});
  SamplerConfig cfg = config(0.02);
  cfg.execution = Execution::Serial;
  Rng a(42);
  const auto s = estimate_log_partition(X, y, cfg, a);
  cfg.execution = Execution::Parallel;
  Rng b(42);
  const auto p = estimate_log_partition(X, y, cfg, b);
  CHECK(s.logPartition == p.logPartition);
  CHECK(s.relErr == p.relErr);

  Rng c(42), d(42);
  for (int i = 0; i < 20; ++i) CHECK(sample_tent(X, y, cfg, c) == sample_tent(X, y, cfg, d));
}
