#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "logcave/body.hpp"
#include "logcave/hit_and_run.hpp"
#include "logcave/rng.hpp"
#include "logcave/sample_set.hpp"
#include "logcave/sampler_config.hpp"

namespace logcave {

/// ceil(1 + 2 ||y||_inf), the level count of the rejection scheme.
int level_count(const Eigen::VectorXd& y);

/// Superlevel sets L_i = {exp(h) >= M 2^{-i}}, i = 1..m, their volumes and the
/// proposal mixture over them. Index i - 1 of each vector refers to L_i.
struct LevelSetDecomposition {
  double logMax = 0.0;    // ln M
  int apex = 0;           // a pole where the tent attains M
  double logMinPole = 0;  // min_i h(X_i), the minimum of h over the hull
  int m = 0;
  std::vector<double> logLevels;
  std::vector<double> volumes;
  double volumeRelErr = 0.0;  // every volume is within this relative error
  double normalizer = 0.0;    // sum_i 2^{-i} vol_i + 2^{-m} vol_m
  std::vector<double> weights;
  std::vector<Ball> innerBalls;
  /// d = 1 only: the levels are intervals [first, second].
  std::vector<std::pair<double, double>> intervals;

  int dim() const { return innerBalls.empty() ? 0 : static_cast<int>(innerBalls.front().center.size()); }
};

/// The inscribed ball of a greedily chosen large simplex on the sample points.
Ball hull_inner_ball(const SampleSet& X);

/// Ball inside {h >= logLevel}, shrunk from hull_inner_ball toward the apex.
Ball level_inner_ball(const SampleSet& X, const Ball& hullBall, int apex, double logMax,
                      double logMinPole, double logLevel);

/// Throws VolumeFailure when a volume cannot be certified.
LevelSetDecomposition build_decomposition(const SampleSet& X, const Eigen::VectorXd& y,
                                          const SamplerConfig& cfg, Rng& rng);

/// One approximately uniform point of the body: a fresh hit-and-run chain
/// from the inner center, burnt in for cfg.walk_steps(d) steps. Exact in d = 1.
Eigen::VectorXd uniform_sample(const ConvexBody& body, const SamplerConfig& cfg, Rng& rng);

/// Rejection sampler for the tent density over a fixed decomposition. Keeps
/// one persistent hit-and-run chain per level, created on first use. Holds
/// references to X; copies everything else.
class TentSampler {
 public:
  TentSampler(const SampleSet& X, const Eigen::VectorXd& y, LevelSetDecomposition dec,
              const SamplerConfig& cfg, Rng rng);
  TentSampler(TentSampler&&) noexcept;
  TentSampler& operator=(TentSampler&&) noexcept;
  ~TentSampler();

  struct Proposal {
    Eigen::VectorXd point;
    double logH = 0.0;  // h(point)
    double ratio = 0.0; // H / G, in [1/2, 1]
  };

  /// One proposal from the level mixture, without the accept step.
  Proposal propose();
  /// An accepted draw. Throws RetryExhausted after the round cap.
  Eigen::VectorXd draw();

  /// Approximately uniform point of L_level (1-based).
  Eigen::VectorXd uniform_on_level(int level);

  long long proposals() const noexcept { return proposals_; }
  long long accepted() const noexcept { return accepted_; }
  double acceptance_rate() const noexcept {
    return proposals_ ? static_cast<double>(accepted_) / proposals_ : 0.0;
  }
  int round_cap() const noexcept { return roundCap_; }
  const LevelSetDecomposition& decomposition() const noexcept { return dec_; }

 private:
  const SampleSet* X_;
  Eigen::VectorXd y_;
  LevelSetDecomposition dec_;
  SamplerConfig cfg_;
  Rng rng_;
  int roundCap_;
  std::vector<double> cumulative_;
  std::vector<std::unique_ptr<TentLevelSet>> bodies_;
  std::vector<std::unique_ptr<HitAndRun>> chains_;
  long long proposals_ = 0;
  long long accepted_ = 0;
};

/// Builds the decomposition and returns one draw.
Eigen::VectorXd sample_tent(const SampleSet& X, const Eigen::VectorXd& y, const SamplerConfig& cfg,
                            Rng& rng);

struct LogPartitionEstimate {
  double logPartition = 0.0;  // ln gamma'
  double relErr = 0.0;        // gamma' within a factor (1 + relErr) of the integral
  double acceptance = 0.0;    // mean of H / G over the trials
  long long trials = 0;
  int levels = 0;
};

/// Number of acceptance trials: ceil(ln(2/tau) / (2 delta^2)).
long long partition_trials(double delta, double tau);

/// gamma' = M c alpha, with alpha the mean acceptance probability over
/// partition_trials(delta, tau) proposals. Needs delta < 1/16.
LogPartitionEstimate estimate_log_partition(const SampleSet& X, const Eigen::VectorXd& y,
                                            const SamplerConfig& cfg, Rng& rng);

/// Same, reusing a decomposition already built for y.
LogPartitionEstimate estimate_log_partition(const SampleSet& X, const Eigen::VectorXd& y,
                                            const LevelSetDecomposition& dec,
                                            const SamplerConfig& cfg, Rng& rng);

}  // namespace logcave
