#include "logcave/tent_model.hpp"

#include <cmath>

#include "logcave/error.hpp"
#include "logcave/rng.hpp"
#include "logcave/sampler.hpp"
#include "logcave/tent.hpp"

namespace logcave {

TentParams::TentParams(Eigen::VectorXd y) : y_(std::move(y)) {
  if (y_.size() == 0 || !y_.allFinite()) throw PreconditionViolation("tent heights must be finite");
  const double scale = std::max(1.0, y_.cwiseAbs().sum());
  if (std::abs(y_.sum()) > 1e-9 * scale) throw PreconditionViolation("tent heights must sum to zero");
}

TentParams TentParams::normalized(Eigen::VectorXd y) {
  if (y.size() == 0 || !y.allFinite()) throw PreconditionViolation("tent heights must be finite");
  y.array() -= y.mean();
  return TentParams(std::move(y));
}

TentDensity::TentDensity(SampleSet samples, TentParams params) : X_(std::move(samples)), y_(std::move(params)) {
  if (y_.size() != X_.size()) throw PreconditionViolation("one tent height per sample point is required");
}

double TentDensity::log_partition(const SamplerConfig& cfg) {
  if (!cache_) {
    Rng rng(cfg.seed);
    const LogPartitionEstimate e = estimate_log_partition(X_, y_.values(), cfg, rng);
    cache_ = CachedPartition{e.logPartition, e.relErr, cfg.delta, cfg.tau, cfg.seed};
  }
  return cache_->logPartition;
}

double tent_density_value(TentDensity& td, const Eigen::VectorXd& x, const SamplerConfig& cfg) {
  const auto h = tent_evaluate(td.samples(), td.params().values(), x);
  if (!h) return 0.0;
  return std::exp(*h - td.log_partition(cfg));
}

double tent_density_value(TentDensity& td, const Eigen::VectorXd& x, double delta, double tau) {
  SamplerConfig cfg;
  cfg.delta = delta;
  cfg.tau = tau;
  return tent_density_value(td, x, cfg);
}

ObjectiveValue objective_value(const SampleSet& X, const Eigen::VectorXd& y, double logPartition) {
  ObjectiveValue v;
  v.surrogate = y.mean() - logPartition;
  double poles = 0.0;
  for (int i = 0; i < X.size(); ++i) {
    const auto h = tent_evaluate(X, y, X.point(i));
    if (!h) throw NumericalFailure("tent LP rejected a sample point");
    poles += *h;
  }
  v.loglik = poles - X.size() * logPartition;
  return v;
}

Eigen::VectorXd stochastic_subgradient(const SampleSet& X, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& s) {
  const PolyhedralStatistic T = polyhedral_statistic(X, y, s);
  return Eigen::VectorXd::Constant(X.size(), 1.0 / X.size()) - T.weights;
}

}  // namespace logcave
