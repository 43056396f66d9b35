#include "logcave/hit_and_run.hpp"

#include <algorithm>

#include "logcave/error.hpp"

namespace logcave {

HitAndRun::HitAndRun(const ConvexBody& body, Eigen::VectorXd start, Rng rng)
    : body_(&body), x_(std::move(start)), rng_(std::move(rng)) {}

const Eigen::VectorXd& HitAndRun::advance(int steps) {
  const int d = body_->dim();
  const int sweep = std::max(steps, d);
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd u = rng_.direction(d);
    const auto [lo, hi] = body_->chord(x_, u);
    ++taken_;
    if (hi - lo <= 1e-14 * (1.0 + x_.norm())) {
      if (++stuck_ >= sweep) throw WalkStuck("hit-and-run found only degenerate chords");
      continue;
    }
    stuck_ = 0;
    x_ += rng_.uniform(lo, hi) * u;
  }
  return x_;
}

}  // namespace logcave
