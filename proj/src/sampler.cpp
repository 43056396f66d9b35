#include "logcave/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "logcave/error.hpp"
#include "logcave/parallel.hpp"
#include "logcave/tent.hpp"
#include "logcave/volume.hpp"

namespace logcave {
namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr int kPartitionChunks = 32;
constexpr int kMaxDoublings = 6;

VolumeBackend resolve_backend(const SamplerConfig& cfg, int d) {
  if (cfg.volumeBackend != VolumeBackend::Auto) return cfg.volumeBackend;
  return d <= 3 ? VolumeBackend::Grid : VolumeBackend::MonteCarlo;
}

/// vol(L_i) / vol(L_{i+1}) from points of L_{i+1}, doubled until the
/// confidence interval is within target.
FractionEstimate nested_ratio(const TentLevelSet& outer, double innerLogLevel, const SampleSet& X,
                              const Eigen::VectorXd& y, const Eigen::VectorXd& start, double target,
                              double z, long long samples, const SamplerConfig& cfg, const Rng& rng) {
  auto inInner = [&](const Eigen::VectorXd& x) { return in_superlevel(X, y, innerLogLevel, x); };
  const int thin = outer.dim();
  for (int round = 0; round <= kMaxDoublings; ++round, samples *= 2) {
    const FractionEstimate f = estimate_fraction(outer, inInner, start, samples, thin, cfg, rng.split(round));
    if (f.fraction > 0 && std::expm1(z * f.stdErr / f.fraction) <= target) return f;
  }
  throw VolumeFailure("nested level ratio did not reach relative error " + std::to_string(target));
}

}  // namespace

void SamplerConfig::validate() const {
  if (!(delta > 0 && delta < 1)) throw PreconditionViolation("sampler delta must lie in (0, 1)");
  if (!(tau > 0 && tau < 1)) throw PreconditionViolation("sampler tau must lie in (0, 1)");
  if (walkSteps < 0) throw PreconditionViolation("walkSteps must be positive (0 selects the default)");
  if (chains < 1) throw PreconditionViolation("at least one chain is required");
}

int SamplerConfig::walk_steps(int d) const {
  if (walkSteps > 0) return walkSteps;
  // One hit-and-run step on an interval is already an exact uniform draw.
  return d == 1 ? 1 : 100 * d * d;
}

int level_count(const Eigen::VectorXd& y) {
  return static_cast<int>(std::ceil(1.0 + 2.0 * y.cwiseAbs().maxCoeff()));
}

Ball hull_inner_ball(const SampleSet& X) {
  const int d = X.dim();
  const int n = X.size();
  const Eigen::MatrixXd& P = X.points();

  int first = 0;
  (P.colwise() - X.centroid()).colwise().squaredNorm().maxCoeff(&first);
  std::vector<int> chosen{first};
  Eigen::MatrixXd Q(d, 0);
  for (int k = 0; k < d; ++k) {
    int best = -1;
    double bestNorm = -1.0;
    Eigen::VectorXd bestResidual;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd r = P.col(i) - P.col(first);
      if (Q.cols() > 0) r -= Q * (Q.transpose() * r);
      if (r.norm() > bestNorm) {
        bestNorm = r.norm();
        best = i;
        bestResidual = r;
      }
    }
    chosen.push_back(best);
    Q.conservativeResize(d, k + 1);
    Q.col(k) = bestResidual / bestNorm;
  }

  Eigen::MatrixXd E(d, d);
  for (int j = 1; j <= d; ++j) E.col(j - 1) = P.col(chosen[j]) - P.col(chosen[0]);
  const Eigen::MatrixXd G = E.partialPivLu().inverse();  // row j: gradient of barycentric j + 1
  std::vector<double> gradNorm(d + 1);
  gradNorm[0] = G.colwise().sum().norm();
  for (int j = 1; j <= d; ++j) gradNorm[j] = G.row(j - 1).norm();
  double total = 0.0;
  for (double g : gradNorm) total += g;
  const double r = 1.0 / total;
  Eigen::VectorXd center = Eigen::VectorXd::Zero(d);
  for (int j = 0; j <= d; ++j) center += r * gradNorm[j] * P.col(chosen[j]);
  return Ball{center, r};
}

Ball level_inner_ball(const SampleSet& X, const Ball& hullBall, int apex, double logMax,
                      double logMinPole, double logLevel) {
  const Eigen::VectorXd a = X.point(apex);
  const double span = logMax - logMinPole;
  // Concavity: h >= logLevel on apex + t (S_n - apex) for t <= (logMax - logLevel) / span.
  const double t = span > 0 ? std::clamp((logMax - logLevel) / span, 0.0, 1.0) : 1.0;
  return Ball{a + t * (hullBall.center - a), t * hullBall.radius};
}

LevelSetDecomposition build_decomposition(const SampleSet& X, const Eigen::VectorXd& y,
                                          const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  const int d = X.dim();
  const int n = X.size();
  if (y.size() != n || !y.allFinite()) throw PreconditionViolation("tent heights must be finite, one per point");

  LevelSetDecomposition dec;
  dec.logMax = y.maxCoeff(&dec.apex);
  dec.logMinPole = dec.logMax;
  for (int i = 0; i < n; ++i) {
    const auto h = tent_evaluate(X, y, X.point(i));
    if (!h) throw NumericalFailure("tent LP rejected a sample point");
    dec.logMinPole = std::min(dec.logMinPole, *h);
  }
  // L_m must cover the hull, which the level_count formula alone does not guarantee.
  const int cover = static_cast<int>(std::ceil((dec.logMax - dec.logMinPole) / kLn2 - 1e-12));
  dec.m = std::max({level_count(y), cover, 1});
  const int m = dec.m;
  // Levels at or below min h are the whole hull and share one volume.
  int full = m;
  for (int i = 1; i <= m; ++i) {
    dec.logLevels.push_back(dec.logMax - i * kLn2);
    if (full == m && dec.logLevels.back() <= dec.logMinPole) full = i;
  }

  const Ball hullBall = hull_inner_ball(X);
  for (int i = 1; i <= m; ++i) {
    dec.innerBalls.push_back(
        level_inner_ball(X, hullBall, dec.apex, dec.logMax, dec.logMinPole, dec.logLevels[i - 1]));
  }

  dec.volumes.assign(m, 0.0);
  if (d == 1) {
    const Eigen::VectorXd a = X.point(dec.apex);
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(1);
    for (int i = 1; i <= m; ++i) {
      double lo = a(0);
      double hi = a(0);
      if (i < full) {
        const auto up = superlevel_chord(X, y, dec.logLevels[i - 1], a, u);
        const auto down = superlevel_chord(X, y, dec.logLevels[i - 1], a, -u);
        if (!up || !down) throw NumericalFailure("apex is not in its own superlevel set");
        lo -= *down;
        hi += *up;
      } else {
        lo = X.lower()(0);
        hi = X.upper()(0);
      }
      dec.intervals.emplace_back(lo, hi);
      dec.volumes[i - 1] = hi - lo;
    }
    dec.volumeRelErr = 0.0;
  } else if (resolve_backend(cfg, d) == VolumeBackend::Grid) {
    for (int i = 1; i <= full; ++i) {
      const TentLevelSet L(X, y, dec.logLevels[i - 1], dec.innerBalls[i - 1]);
      const VolumeEstimate v = estimate_volume_grid(L, cfg);
      dec.volumes[i - 1] = v.volume;
      dec.volumeRelErr = std::max(dec.volumeRelErr, v.relErr);
    }
  } else {
    SamplerConfig stage = cfg;
    stage.delta = cfg.delta / std::sqrt(static_cast<double>(full));
    const double z = std::sqrt(2.0 * std::log(2.0 * full / cfg.tau));
    const Rng root = rng.split(0x646563ULL);
    const TentLevelSet top(X, y, dec.logLevels[full - 1], dec.innerBalls[full - 1]);
    Rng topRng = root.split(0);
    const VolumeEstimate v = estimate_volume_mc(top, stage, topRng);
    dec.volumes[full - 1] = v.volume;
    double logErrSq = std::log1p(v.relErr) * std::log1p(v.relErr);
    const long long samples = static_cast<long long>(
        std::ceil(2.0 * std::log(2.0 * full / cfg.tau) * full / (cfg.delta * cfg.delta)));
    for (int i = full - 1; i >= 1; --i) {
      const TentLevelSet outer(X, y, dec.logLevels[i], dec.innerBalls[i]);
      const FractionEstimate f = nested_ratio(outer, dec.logLevels[i - 1], X, y, dec.innerBalls[i - 1].center,
                                              stage.delta, z, samples, cfg, root.split(i));
      dec.volumes[i - 1] = dec.volumes[i] * f.fraction;
      const double rel = std::log1p(std::expm1(z * f.stdErr / f.fraction));
      logErrSq += rel * rel;
    }
    dec.volumeRelErr = std::expm1(std::sqrt(logErrSq));
    rng.next();
  }
  for (int i = full + 1; i <= m; ++i) dec.volumes[i - 1] = dec.volumes[full - 1];

  std::vector<double> terms(m);
  dec.normalizer = 0.0;
  for (int i = 1; i <= m; ++i) {
    // The last level carries 2^{-m} twice: once in the sum and once as the tail.
    terms[i - 1] = std::ldexp(dec.volumes[i - 1], -i) * (i == m ? 2.0 : 1.0);
    dec.normalizer += terms[i - 1];
  }
  if (!(dec.normalizer > 0)) throw VolumeFailure("all superlevel sets have zero volume");
  for (double t : terms) dec.weights.push_back(t / dec.normalizer);
  return dec;
}

Eigen::VectorXd uniform_sample(const ConvexBody& body, const SamplerConfig& cfg, Rng& rng) {
  const Ball in = body.inner_ball();
  if (body.dim() == 1) {
    const auto [lo, hi] = body.chord(in.center, Eigen::VectorXd::Ones(1));
    return in.center.array() + rng.uniform(lo, hi);
  }
  HitAndRun walk(body, in.center, rng.split(rng.next()));
  return walk.advance(cfg.walk_steps(body.dim()));
}

TentSampler::TentSampler(const SampleSet& X, const Eigen::VectorXd& y, LevelSetDecomposition dec,
                         const SamplerConfig& cfg, Rng rng)
    : X_(&X), y_(y), dec_(std::move(dec)), cfg_(cfg), rng_(std::move(rng)) {
  roundCap_ = std::max(1, static_cast<int>(std::ceil(64.0 * std::log(1.0 / cfg.tau))));
  double acc = 0.0;
  for (double w : dec_.weights) cumulative_.push_back(acc += w);
  bodies_.resize(dec_.m);
  chains_.resize(dec_.m);
}

TentSampler::TentSampler(TentSampler&&) noexcept = default;
TentSampler& TentSampler::operator=(TentSampler&&) noexcept = default;
TentSampler::~TentSampler() = default;

Eigen::VectorXd TentSampler::uniform_on_level(int level) {
  if (level < 1 || level > dec_.m) throw PreconditionViolation("level index out of range");
  if (!dec_.intervals.empty()) {
    const auto [lo, hi] = dec_.intervals[level - 1];
    return Eigen::VectorXd::Constant(1, rng_.uniform(lo, hi));
  }
  const int d = X_->dim();
  auto& chain = chains_[level - 1];
  if (!chain) {
    bodies_[level - 1] = std::make_unique<TentLevelSet>(*X_, y_, dec_.logLevels[level - 1],
                                                        dec_.innerBalls[level - 1]);
    chain = std::make_unique<HitAndRun>(*bodies_[level - 1], dec_.innerBalls[level - 1].center,
                                        rng_.split(static_cast<std::uint64_t>(level)));
    chain->advance(cfg_.walk_steps(d));
  }
  return chain->advance(cfg_.walk_steps(d));
}

TentSampler::Proposal TentSampler::propose() {
  const double u = rng_.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const int level = static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative_.begin(), dec_.m - 1)) + 1;

  Proposal p;
  p.point = uniform_on_level(level);
  const auto h = tent_evaluate(*X_, y_, p.point);
  if (!h) throw NumericalFailure("proposal left the sample hull");
  p.logH = *h;
  const double gap = dec_.logMax - p.logH;
  if (gap < -1e-7) throw NumericalFailure("tent exceeds its maximum at a proposal");
  const int k = std::min(static_cast<int>(std::floor(std::max(gap, 0.0) / kLn2)), dec_.m);
  const double logG = dec_.logMax - k * kLn2;
  const double ratio = std::exp(p.logH - logG);
  // G/2 <= H <= G, up to LP round-off.
  if (ratio < 0.5 - 1e-7 || ratio > 1.0 + 1e-7) {
    throw NumericalFailure("rejection envelope violated: H/G = " + std::to_string(ratio));
  }
  p.ratio = std::clamp(ratio, 0.5, 1.0);
  ++proposals_;
  return p;
}

Eigen::VectorXd TentSampler::draw() {
  for (int round = 0; round < roundCap_; ++round) {
    Proposal p = propose();
    if (rng_.uniform() < p.ratio) {
      ++accepted_;
      return std::move(p.point);
    }
  }
  throw RetryExhausted("rejection sampler exceeded " + std::to_string(roundCap_) + " rounds");
}

Eigen::VectorXd sample_tent(const SampleSet& X, const Eigen::VectorXd& y, const SamplerConfig& cfg,
                            Rng& rng) {
  LevelSetDecomposition dec = build_decomposition(X, y, cfg, rng);
  TentSampler sampler(X, y, std::move(dec), cfg, rng.split(rng.next()));
  return sampler.draw();
}

long long partition_trials(double delta, double tau) {
  return static_cast<long long>(std::ceil(std::log(2.0 / tau) / (2.0 * delta * delta)));
}

LogPartitionEstimate estimate_log_partition(const SampleSet& X, const Eigen::VectorXd& y,
                                            const SamplerConfig& cfg, Rng& rng) {
  if (!(cfg.delta < 1.0 / 16.0)) throw PreconditionViolation("log-partition estimate needs delta < 1/16");
  const LevelSetDecomposition dec = build_decomposition(X, y, cfg, rng);
  return estimate_log_partition(X, y, dec, cfg, rng);
}

LogPartitionEstimate estimate_log_partition(const SampleSet& X, const Eigen::VectorXd& y,
                                            const LevelSetDecomposition& dec,
                                            const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  if (!(cfg.delta < 1.0 / 16.0)) throw PreconditionViolation("log-partition estimate needs delta < 1/16");
  const long long N = partition_trials(cfg.delta, cfg.tau);
  const int chunks = static_cast<int>(std::min<long long>(kPartitionChunks, N));
  std::vector<double> sums(chunks, 0.0);
  const Rng base = rng.split(rng.next());
  parallel_for(cfg.execution, static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const long long begin = N * static_cast<long long>(c) / chunks;
    const long long end = N * static_cast<long long>(c + 1) / chunks;
    TentSampler sampler(X, y, dec, cfg, base.split(c));
    double s = 0.0;
    for (long long t = begin; t < end; ++t) s += sampler.propose().ratio;
    sums[c] = s;
  });
  double total = 0.0;
  for (double s : sums) total += s;

  LogPartitionEstimate out;
  out.trials = N;
  out.levels = dec.m;
  out.acceptance = total / static_cast<double>(N);
  out.logPartition = dec.logMax + std::log(dec.normalizer) + std::log(out.acceptance);
  const double hoeffding = std::sqrt(std::log(2.0 / cfg.tau) / (2.0 * static_cast<double>(N)));
  const double bias = X.dim() == 1 ? 0.0 : 4.0 * cfg.delta;
  out.relErr = (1.0 + dec.volumeRelErr) * (1.0 + (hoeffding + bias) / out.acceptance) - 1.0;
  return out;
}

}  // namespace logcave
