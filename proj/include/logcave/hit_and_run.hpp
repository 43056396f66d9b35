#pragma once

#include <Eigen/Core>

#include "logcave/body.hpp"
#include "logcave/rng.hpp"

namespace logcave {

/// Hit-and-run on a convex body: pick a uniform direction, then a uniform
/// point on the chord through the current point. The body must outlive the
/// walk.
class HitAndRun {
 public:
  HitAndRun(const ConvexBody& body, Eigen::VectorXd start, Rng rng);

  /// Takes `steps` steps and returns the new position. Throws WalkStuck when
  /// every chord in a sweep of max(steps, d) directions has zero length.
  const Eigen::VectorXd& advance(int steps);

  const Eigen::VectorXd& point() const noexcept { return x_; }
  long long steps_taken() const noexcept { return taken_; }

 private:
  const ConvexBody* body_;
  Eigen::VectorXd x_;
  Rng rng_;
  int stuck_ = 0;
  long long taken_ = 0;
};

}  // namespace logcave
