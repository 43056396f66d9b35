#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "logcave/parallel.hpp"
#include "logcave/sample_set.hpp"

namespace logcave {

/// h_{X,y}(x): the optimum of the packing LP
///   max sum a_i y_i  s.t.  sum a_i X_i = x, sum a_i = 1, a >= 0.
/// std::nullopt when x lies outside the hull S_n.
std::optional<double> tent_evaluate(const SampleSet& X, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& x, double feasTol = 1e-9);

struct PolyhedralStatistic {
  Eigen::VectorXd weights;  // T(x), a point of the probability simplex
  double value = 0.0;       // <T, y> = h(x)
  /// The optimal vertex is not unique (x on a cell boundary or the
  /// subdivision is not a triangulation); weights is one valid choice.
  bool boundary = false;
};

/// Throws OutsideHull when x is not in S_n.
PolyhedralStatistic polyhedral_statistic(const SampleSet& X, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& x, double feasTol = 1e-9);

/// An affine majorant z -> intercept + slope^T z of the tent, tight at the
/// query point. Comes from the dual covering LP.
struct AffineMajorant {
  Eigen::VectorXd slope;
  double intercept = 0.0;
  double operator()(const Eigen::VectorXd& z) const { return intercept + slope.dot(z); }
};

/// nullopt outside the hull.
std::optional<AffineMajorant> supporting_affine(const SampleSet& X, const Eigen::VectorXd& y,
                                                const Eigen::VectorXd& x, double feasTol = 1e-9);

/// ln M, where M = max exp(h). The maximum of the tent is attained at a pole.
double tent_log_max(const Eigen::VectorXd& y);

/// exp(h(x)) >= level. level must be positive.
bool membership_oracle(const SampleSet& X, const Eigen::VectorXd& y, double level,
                       const Eigen::VectorXd& x);
/// Same test with the threshold given as ln(level).
bool in_superlevel(const SampleSet& X, const Eigen::VectorXd& y, double logLevel,
                   const Eigen::VectorXd& x);

struct Inside {};

/// The closed halfspace {z : normal^T z <= offset} contains the superlevel
/// set; the query point lies strictly outside it. normal has unit length.
struct Hyperplane {
  Eigen::VectorXd normal;
  double offset = 0.0;
  bool excludes(const Eigen::VectorXd& z) const { return normal.dot(z) > offset; }
};

using Separation = std::variant<Inside, Hyperplane>;

/// Membership, or a hyperplane cutting x off from {exp(h) >= level}.
/// The cut sits on the level ln(level) - delta/2 of an affine majorant of the
/// tent, moved toward ln(level) when needed to keep x strictly excluded.
/// Throws DegenerateLevel when level exceeds M.
Separation separation_oracle(const SampleSet& X, const Eigen::VectorXd& y, double level,
                             const Eigen::VectorXd& x, double delta = 0.0);
Separation separation_oracle_log(const SampleSet& X, const Eigen::VectorXd& y, double logLevel,
                                 const Eigen::VectorXd& x, double delta = 0.0);

/// Largest t >= 0 with x0 + t u in {h >= logLevel}, or nullopt if x0 itself
/// is not in the set.
std::optional<double> superlevel_chord(const SampleSet& X, const Eigen::VectorXd& y,
                                       double logLevel, const Eigen::VectorXd& x0,
                                       const Eigen::VectorXd& u, double feasTol = 1e-9);

/// Tent values at the columns of queries.
std::vector<std::optional<double>> tent_evaluate_batch(const SampleSet& X, const Eigen::VectorXd& y,
                                                       const Eigen::MatrixXd& queries,
                                                       Execution policy = Execution::Parallel);

}  // namespace logcave
