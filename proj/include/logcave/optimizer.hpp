#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "logcave/error.hpp"
#include "logcave/rng.hpp"
#include "logcave/sample_set.hpp"
#include "logcave/sampler_config.hpp"
#include "logcave/tent_model.hpp"

namespace logcave {

/// 2 n^2 d ln(2nd), the diameter of the feasible set.
double diameter_bound(int n, int d);
/// c = 8 n^2 d ln(2nd).
double step_constant(int n, int d);

/// Euclidean projection onto {1^T y = 0, ||y||_2 <= radius}.
TentParams project_feasible(const Eigen::VectorXd& y, double radius);

struct SolverConfig {
  double epsilon = 0.1;
  double tau = 0.05;
  /// Cap on the 2c^2/eps^2 iterations; 0 runs the full count.
  long long maxIters = 5000;
  double stepScale = 1.0;
  /// Sampler settings. delta is replaced by eps / (2 diam) unless
  /// samplerDelta is set; tau by this config's tau.
  SamplerConfig sampler;
  std::optional<double> samplerDelta;
  /// 0 selects c.
  double projectionRadius = 0.0;
  /// Geometric interpolation of the sampler delta from deltaStart down to
  /// the target over the run.
  bool coarseToFine = false;
  double deltaStart = 0.05;
  /// Objective trace: this many evaluations of F at the running average,
  /// each with a log-partition estimate at traceDelta. 0 disables it.
  int tracePoints = 50;
  double traceDelta = 0.02;
  /// Accuracy for certify(); defaults to max(samplerDelta / 10, 1e-3).
  std::optional<double> certifyDelta;

  void validate() const;
};

struct TracePoint {
  long long iteration = 0;
  double surrogate = 0.0;
};

struct FitDiagnostics {
  double acceptanceRate = 0.0;
  long long proposals = 0;
  long long projectionHits = 0;
  long long boundaryStatistics = 0;  // draws landing on a cell boundary
  double samplerDelta = 0.0;
  double stepConstant = 0.0;
  double stepSize = 0.0;  // eta_k = stepSize / sqrt(k)
  double projectionRadius = 0.0;
  long long theoreticalIterations = 0;
  int maxLevels = 0;
  double certifyDelta = 0.0;
};

struct FitReport {
  TentParams yFinal = TentParams::zero(1);
  double loglik = 0.0;
  double logPartition = 0.0;
  double relErr = 0.0;  // of the log-partition behind loglik
  std::vector<TracePoint> surrogateTrace;
  long long iterations = 0;
  std::uint64_t seed = 0;
  bool complete = false;
  FitDiagnostics diagnostics;
};

/// A sampler failure stopped the run; partial() holds the iterates so far.
class FitAborted : public Error {
 public:
  FitAborted(const std::string& what, FitReport partial) : Error(what), partial_(std::move(partial)) {}
  const FitReport& partial() const noexcept { return partial_; }

 private:
  FitReport partial_;
};

/// Projected stochastic subgradient ascent on F(y) = mean(y) - A(y) from
/// y = 0, returning the re-projected average of the iterates.
///
/// Step sizes are eta_k = stepScale * min(c, eps sqrt(K/2)) / sqrt(k): the
/// constant c when K = 2c^2/eps^2, scaled to the horizon when the run is
/// truncated.
FitReport fit(const SampleSet& X, const SolverConfig& cfg, Rng& rng);

struct Certificate {
  double loglik = 0.0;
  double logPartition = 0.0;
  double relErr = 0.0;
  double delta = 0.0;
};

/// log-likelihood of y with a fine log-partition estimate. Throws
/// PreconditionViolation when y is not in the feasible set.
Certificate certify(const SampleSet& X, const Eigen::VectorXd& y, const SolverConfig& cfg, Rng& rng);

/// The sampler accuracy fit() uses for these settings.
double fit_sampler_delta(const SampleSet& X, const SolverConfig& cfg);
double certify_delta(const SampleSet& X, const SolverConfig& cfg);

}  // namespace logcave
