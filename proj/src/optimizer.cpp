#include "logcave/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "logcave/sampler.hpp"
#include "logcave/tent.hpp"

namespace logcave {
namespace {

constexpr std::uint64_t kTraceStream = 1ULL << 40;

bool feasible(const Eigen::VectorXd& y, double radius) {
  const double scale = std::max(1.0, y.cwiseAbs().sum());
  return y.allFinite() && std::abs(y.sum()) <= 1e-9 * scale && y.norm() <= radius * (1 + 1e-12);
}

double radius_for(const SampleSet& X, const SolverConfig& cfg) {
  return cfg.projectionRadius > 0 ? cfg.projectionRadius : step_constant(X.size(), X.dim());
}

}  // namespace

double diameter_bound(int n, int d) {
  return 2.0 * n * n * d * std::log(2.0 * n * d);
}

double step_constant(int n, int d) {
  return 8.0 * n * n * d * std::log(2.0 * n * d);
}

TentParams project_feasible(const Eigen::VectorXd& y, double radius) {
  if (!y.allFinite()) throw NonFiniteObjective("cannot project a non-finite vector");
  Eigen::VectorXd p = y.array() - y.mean();
  const double norm = p.norm();
  if (norm > radius) p *= radius / norm;
  return TentParams(std::move(p));
}

void SolverConfig::validate() const {
  if (!(epsilon > 0 && epsilon < 1)) throw PreconditionViolation("epsilon must lie in (0, 1)");
  if (!(tau > 0 && tau < 1)) throw PreconditionViolation("tau must lie in (0, 1)");
  if (maxIters < 0) throw PreconditionViolation("maxIters must be nonnegative");
  if (!(stepScale > 0)) throw PreconditionViolation("stepScale must be positive");
  if (projectionRadius < 0) throw PreconditionViolation("projectionRadius must be positive");
  if (samplerDelta && !(*samplerDelta > 0 && *samplerDelta < 1)) {
    throw PreconditionViolation("sampler delta must lie in (0, 1)");
  }
  if (certifyDelta && !(*certifyDelta > 0 && *certifyDelta < 1.0 / 16.0)) {
    throw PreconditionViolation("certify delta must lie in (0, 1/16)");
  }
  if (!(deltaStart > 0 && deltaStart < 1)) throw PreconditionViolation("deltaStart must lie in (0, 1)");
  if (tracePoints < 0) throw PreconditionViolation("tracePoints must be nonnegative");
  if (!(traceDelta > 0 && traceDelta < 1.0 / 16.0)) throw PreconditionViolation("traceDelta must lie in (0, 1/16)");
}

double fit_sampler_delta(const SampleSet& X, const SolverConfig& cfg) {
  if (cfg.samplerDelta) return *cfg.samplerDelta;
  return cfg.epsilon / (2.0 * diameter_bound(X.size(), X.dim()));
}

double certify_delta(const SampleSet& X, const SolverConfig& cfg) {
  if (cfg.certifyDelta) return *cfg.certifyDelta;
  return std::min(0.06, std::max(fit_sampler_delta(X, cfg) / 10.0, 1e-3));
}

Certificate certify(const SampleSet& X, const Eigen::VectorXd& y, const SolverConfig& cfg, Rng& rng) {
  cfg.validate();
  if (y.size() != X.size() || !feasible(y, radius_for(X, cfg))) {
    throw PreconditionViolation("certify needs a feasible y (mean zero, within the projection radius)");
  }
  SamplerConfig sc = cfg.sampler;
  sc.delta = certify_delta(X, cfg);
  sc.tau = cfg.tau;
  const LogPartitionEstimate e = estimate_log_partition(X, y, sc, rng);
  Certificate c;
  c.logPartition = e.logPartition;
  c.relErr = e.relErr;
  c.delta = sc.delta;
  c.loglik = objective_value(X, y, e.logPartition).loglik;
  return c;
}

FitReport fit(const SampleSet& X, const SolverConfig& cfg, Rng& rng) {
  cfg.validate();
  const int n = X.size();
  const int d = X.dim();
  const double c = step_constant(n, d);
  const double radius = radius_for(X, cfg);
  const double theoretical = std::ceil(2.0 * c * c / (cfg.epsilon * cfg.epsilon));
  const long long K = cfg.maxIters > 0 ? std::min<long long>(cfg.maxIters, static_cast<long long>(theoretical))
                                       : static_cast<long long>(theoretical);
  const double stepSize = cfg.stepScale * std::min(c, cfg.epsilon * std::sqrt(0.5 * static_cast<double>(K)));
  const double targetDelta = fit_sampler_delta(X, cfg);

  FitReport report;
  report.seed = rng.seed();
  report.yFinal = TentParams::zero(n);
  FitDiagnostics& diag = report.diagnostics;
  diag.samplerDelta = targetDelta;
  diag.stepConstant = c;
  diag.stepSize = stepSize;
  diag.projectionRadius = radius;
  diag.theoreticalIterations = static_cast<long long>(std::min(theoretical, 9.0e18));
  diag.certifyDelta = certify_delta(X, cfg);

  const Rng base = rng.split(0x666974ULL);
  rng.next();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  long long accepted = 0;
  const long long traceEvery = cfg.tracePoints > 0 ? std::max<long long>(1, K / cfg.tracePoints) : 0;

  auto average = [&](long long count) {
    return project_feasible(count > 0 ? Eigen::VectorXd(sum / static_cast<double>(count)) : y, radius);
  };
  auto abort = [&](const std::string& why, long long done) {
    report.iterations = done;
    report.yFinal = average(done);
    report.complete = false;
    diag.acceptanceRate = diag.proposals ? static_cast<double>(accepted) / diag.proposals : 0.0;
    return FitAborted(why, report);
  };

  for (long long k = 1; k <= K; ++k) {
    SamplerConfig sc = cfg.sampler;
    sc.tau = cfg.tau;
    sc.delta = targetDelta;
    if (cfg.coarseToFine && cfg.deltaStart > targetDelta) {
      const double f = static_cast<double>(k) / static_cast<double>(K);
      sc.delta = std::pow(cfg.deltaStart, 1.0 - f) * std::pow(targetDelta, f);
    }

    Eigen::VectorXd g;
    try {
      Rng stepRng = base.split(static_cast<std::uint64_t>(k));
      LevelSetDecomposition dec = build_decomposition(X, y, sc, stepRng);
      diag.maxLevels = std::max(diag.maxLevels, dec.m);
      TentSampler sampler(X, y, std::move(dec), sc, stepRng.split(1));
      const Eigen::VectorXd s = sampler.draw();
      diag.proposals += sampler.proposals();
      accepted += sampler.accepted();
      const PolyhedralStatistic T = polyhedral_statistic(X, y, s);
      if (T.boundary) ++diag.boundaryStatistics;
      g = Eigen::VectorXd::Constant(n, 1.0 / n) - T.weights;
    } catch (const Error& e) {
      throw abort(std::string("sampler failure at iteration ") + std::to_string(k) + ": " + e.what(), k - 1);
    }
    if (!g.allFinite()) throw NonFiniteObjective("non-finite subgradient at iteration " + std::to_string(k));

    sum += y;
    const Eigen::VectorXd step = y + (stepSize / std::sqrt(static_cast<double>(k))) * g;
    const Eigen::VectorXd centered = step.array() - step.mean();
    if (centered.norm() > radius) ++diag.projectionHits;
    y = project_feasible(step, radius).values();
    if (!feasible(y, radius)) throw NumericalFailure("iterate left the feasible set");

    if (traceEvery > 0 && (k % traceEvery == 0 || k == K)) {
      SamplerConfig tc = cfg.sampler;
      tc.tau = cfg.tau;
      tc.delta = cfg.traceDelta;
      try {
        Rng traceRng = base.split(kTraceStream + static_cast<std::uint64_t>(k));
        const LogPartitionEstimate e = estimate_log_partition(X, average(k).values(), tc, traceRng);
        report.surrogateTrace.push_back(TracePoint{k, -e.logPartition});
      } catch (const Error& e) {
        throw abort(std::string("trace evaluation failed at iteration ") + std::to_string(k) + ": " + e.what(), k);
      }
    }
  }

  report.iterations = K;
  report.yFinal = average(K);
  diag.acceptanceRate = diag.proposals ? static_cast<double>(accepted) / diag.proposals : 0.0;
  try {
    Rng certRng = base.split(kTraceStream - 1);
    const Certificate cert = certify(X, report.yFinal.values(), cfg, certRng);
    report.loglik = cert.loglik;
    report.logPartition = cert.logPartition;
    report.relErr = cert.relErr;
  } catch (const Error& e) {
    throw abort(std::string("certification failed: ") + e.what(), K);
  }
  report.complete = true;
  return report;
}

}  // namespace logcave
