#pragma once

#include <functional>

#include <Eigen/Core>

#include "logcave/body.hpp"
#include "logcave/rng.hpp"
#include "logcave/sampler_config.hpp"

namespace logcave {

struct VolumeEstimate {
  double volume = 0.0;
  /// Bound on |estimate - vol| / vol; a confidence bound at level 1 - tau for
  /// Monte Carlo, a hard bound for the grid and for d = 1.
  double relErr = 0.0;
  long long samples = 0;
};

/// Dispatches on cfg.volumeBackend. In d = 1 the body is an interval and its
/// length is read off a single chord through the inner center.
VolumeEstimate estimate_volume(const ConvexBody& body, const SamplerConfig& cfg, Rng& rng);

/// Multiphase telescoping over K ∩ B(c, r 2^{j/d}), with ratios estimated by
/// hit-and-run. Needs only membership. Sample counts are doubled until the
/// certified error drops below cfg.delta; VolumeFailure after six doublings.
VolumeEstimate estimate_volume_mc(const ConvexBody& body, const SamplerConfig& cfg, Rng& rng);

/// Adaptive cell classification for d <= 3. A cell is inside when all of its
/// corners are, outside when a separating hyperplane at its center cuts off
/// every corner. Needs body.has_separation().
VolumeEstimate estimate_volume_grid(const ConvexBody& body, const SamplerConfig& cfg);

struct FractionEstimate {
  double fraction = 0.0;
  double stdErr = 0.0;  // across-chain standard error
  long long samples = 0;
};

/// Fraction of (approximately) uniform points of `body` satisfying `inSub`,
/// from cfg.chains hit-and-run chains started at `start`. Chain c draws from
/// rng.split(c), so the result does not depend on cfg.execution.
FractionEstimate estimate_fraction(const ConvexBody& body,
                                   const std::function<bool(const Eigen::VectorXd&)>& inSub,
                                   const Eigen::VectorXd& start, long long samples, int thin,
                                   const SamplerConfig& cfg, const Rng& rng);

}  // namespace logcave
