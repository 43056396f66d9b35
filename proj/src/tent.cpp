#include "logcave/tent.hpp"

#include <cmath>

#include "logcave/error.hpp"
#include "logcave/lp.hpp"

namespace logcave {
namespace {

LpProblem packing_lp(const SampleSet& X, const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
  const int d = X.dim();
  const int n = X.size();
  if (y.size() != n) throw PreconditionViolation("tent heights must have one entry per point");
  if (x.size() != d) throw PreconditionViolation("query dimension does not match the samples");
  if (!x.allFinite()) throw PreconditionViolation("query point must be finite");
  LpProblem lp;
  lp.objective = y;
  lp.constraints.resize(d + 1, n);
  lp.constraints.topRows(d) = X.points();
  lp.constraints.row(d).setOnes();
  lp.rhs.resize(d + 1);
  lp.rhs.head(d) = x;
  lp.rhs(d) = 1.0;
  lp.senses.assign(d + 1, RowSense::Equal);
  return lp;
}

/// An affine majorant of the tent whose value at x is target; x is outside
/// the hull and ray is the Farkas certificate of that.
AffineMajorant farkas_majorant(const Eigen::VectorXd& y, const Eigen::VectorXd& ray,
                               const Eigen::VectorXd& x, double target) {
  const int d = static_cast<int>(x.size());
  const Eigen::VectorXd r = ray.head(d);
  const double r0 = ray(d);
  const double atX = r0 + r.dot(x);  // < 0
  const double top = y.maxCoeff();
  const double t = (top - target) / -atX;
  return AffineMajorant{t * r, top + t * r0};
}

Hyperplane cut(const AffineMajorant& a, double theta) {
  // {a(z) >= theta}  <=>  -slope^T z <= intercept - theta
  const double norm = a.slope.norm();
  return Hyperplane{-a.slope / norm, (a.intercept - theta) / norm};
}

}  // namespace

std::optional<double> tent_evaluate(const SampleSet& X, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& x, double feasTol) {
  const LpSolution s = solve_lp(packing_lp(X, y, x), feasTol);
  if (s.status != LpStatus::Optimal) return std::nullopt;
  return s.objective;
}

PolyhedralStatistic polyhedral_statistic(const SampleSet& X, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& x, double feasTol) {
  const LpSolution s = solve_lp(packing_lp(X, y, x), feasTol);
  if (s.status != LpStatus::Optimal) throw OutsideHull("query point lies outside the sample hull");
  PolyhedralStatistic out;
  out.weights = s.primal;
  const double total = out.weights.sum();
  if (total > 0) out.weights /= total;
  out.value = out.weights.dot(y);
  out.boundary = s.alternativeOptima;
  return out;
}

std::optional<AffineMajorant> supporting_affine(const SampleSet& X, const Eigen::VectorXd& y,
                                                const Eigen::VectorXd& x, double feasTol) {
  const LpSolution s = solve_lp(packing_lp(X, y, x), feasTol);
  if (s.status != LpStatus::Optimal) return std::nullopt;
  const int d = X.dim();
  return AffineMajorant{s.dual.head(d), s.dual(d)};
}

double tent_log_max(const Eigen::VectorXd& y) { return y.maxCoeff(); }

bool in_superlevel(const SampleSet& X, const Eigen::VectorXd& y, double logLevel,
                   const Eigen::VectorXd& x) {
  const auto h = tent_evaluate(X, y, x);
  return h && *h >= logLevel;
}

bool membership_oracle(const SampleSet& X, const Eigen::VectorXd& y, double level,
                       const Eigen::VectorXd& x) {
  if (!(level > 0)) throw PreconditionViolation("membership level must be positive");
  return in_superlevel(X, y, std::log(level), x);
}

Separation separation_oracle_log(const SampleSet& X, const Eigen::VectorXd& y, double logLevel,
                                 const Eigen::VectorXd& x, double delta) {
  if (logLevel > tent_log_max(y) + 1e-12) {
    throw DegenerateLevel("level exceeds the maximum of the tent density");
  }
  const LpSolution s = solve_lp(packing_lp(X, y, x));
  const int d = X.dim();
  AffineMajorant a;
  if (s.status == LpStatus::Optimal) {
    if (s.objective >= logLevel) return Inside{};
    a = AffineMajorant{s.dual.head(d), s.dual(d)};
  } else {
    a = farkas_majorant(y, s.dual, x, logLevel - 1.0);
  }
  const double atX = a(x);
  const double theta = std::max(logLevel - 0.5 * delta, 0.5 * (atX + logLevel));
  return cut(a, theta);
}

Separation separation_oracle(const SampleSet& X, const Eigen::VectorXd& y, double level,
                             const Eigen::VectorXd& x, double delta) {
  if (!(level > 0)) throw PreconditionViolation("separation level must be positive");
  return separation_oracle_log(X, y, std::log(level), x, delta);
}

std::optional<double> superlevel_chord(const SampleSet& X, const Eigen::VectorXd& y,
                                       double logLevel, const Eigen::VectorXd& x0,
                                       const Eigen::VectorXd& u, double feasTol) {
  const int d = X.dim();
  const int n = X.size();
  LpProblem lp;
  lp.objective = Eigen::VectorXd::Zero(n + 1);
  lp.objective(n) = 1.0;
  lp.constraints = Eigen::MatrixXd::Zero(d + 2, n + 1);
  lp.constraints.topLeftCorner(d, n) = X.points();
  lp.constraints.col(n).head(d) = -u;
  lp.constraints.row(d).head(n).setOnes();
  lp.constraints.row(d + 1).head(n) = y.transpose();
  lp.rhs.resize(d + 2);
  lp.rhs.head(d) = x0;
  lp.rhs(d) = 1.0;
  lp.rhs(d + 1) = logLevel;
  lp.senses.assign(d + 2, RowSense::Equal);
  lp.senses[d + 1] = RowSense::GreaterEqual;
  const LpSolution s = solve_lp(lp, feasTol);
  if (s.status == LpStatus::Infeasible) return std::nullopt;
  if (s.status == LpStatus::Unbounded) throw PreconditionViolation("chord direction must be nonzero");
  return s.primal(n);
}

std::vector<std::optional<double>> tent_evaluate_batch(const SampleSet& X, const Eigen::VectorXd& y,
                                                       const Eigen::MatrixXd& queries,
                                                       Execution policy) {
  std::vector<std::optional<double>> out(static_cast<std::size_t>(queries.cols()));
  parallel_for(policy, out.size(), [&](std::size_t i) {
    out[i] = tent_evaluate(X, y, queries.col(static_cast<Eigen::Index>(i)));
  });
  return out;
}

}  // namespace logcave
