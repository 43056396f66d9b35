#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "logcave/sample_set.hpp"
#include "logcave/sampler_config.hpp"

namespace logcave {

/// Tent heights y with 1^T y = 0.
class TentParams {
 public:
  /// Throws PreconditionViolation unless y is finite and sums to zero.
  explicit TentParams(Eigen::VectorXd y);
  /// Subtracts the mean first.
  static TentParams normalized(Eigen::VectorXd y);
  static TentParams zero(int n) { return TentParams(Eigen::VectorXd::Zero(n)); }

  const Eigen::VectorXd& values() const noexcept { return y_; }
  int size() const noexcept { return static_cast<int>(y_.size()); }

 private:
  Eigen::VectorXd y_;
};

struct CachedPartition {
  double logPartition = 0.0;
  double relErr = 0.0;
  double delta = 0.0;
  double tau = 0.0;
  std::uint64_t seed = 0;
};

/// p(x) = exp(h_{X,y}(x) - A(y)) on the hull, 0 elsewhere.
class TentDensity {
 public:
  TentDensity(SampleSet samples, TentParams params);

  const SampleSet& samples() const noexcept { return X_; }
  const TentParams& params() const noexcept { return y_; }
  const std::optional<CachedPartition>& cached() const noexcept { return cache_; }
  void set_partition(const CachedPartition& c) { cache_ = c; }

  /// The cached estimate, computed with cfg (and stored) when absent.
  double log_partition(const SamplerConfig& cfg);

 private:
  SampleSet X_;
  TentParams y_;
  std::optional<CachedPartition> cache_;
};

double tent_density_value(TentDensity& td, const Eigen::VectorXd& x, const SamplerConfig& cfg);
/// Uses seed 0 when the log-partition is not cached yet.
double tent_density_value(TentDensity& td, const Eigen::VectorXd& x, double delta, double tau);

struct ObjectiveValue {
  double surrogate = 0.0;  // mean(y) - A
  double loglik = 0.0;     // sum_i h(X_i) - n A
};

ObjectiveValue objective_value(const SampleSet& X, const Eigen::VectorXd& y, double logPartition);

/// (1/n) 1 - T(s). Throws OutsideHull when s is not in the hull.
Eigen::VectorXd stochastic_subgradient(const SampleSet& X, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& s);

}  // namespace logcave
