#pragma once

#include <vector>

#include <Eigen/Core>

namespace logcave {

enum class RowSense { LessEqual, GreaterEqual, Equal };
enum class LpStatus { Optimal, Infeasible, Unbounded };

/// optimize c^T x subject to A x (sense) b, x >= 0.
///
/// Every variable carries the lower bound 0 and no upper bound; free
/// variables are modelled by splitting.
struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;
  Eigen::VectorXd rhs;
  std::vector<RowSense> senses;
  bool maximize = true;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd primal;
  /// Optimal: row multipliers with objective = rhs^T dual.
  /// Infeasible: a Farkas ray, A_j^T dual >= 0 for every column j and
  /// rhs^T dual < 0 (signs compatible with the row senses).
  Eigen::VectorXd dual;
  double objective = 0.0;
  /// Some nonbasic column has a zero reduced cost: the optimal vertex may
  /// not be unique.
  bool alternativeOptima = false;
  int pivots = 0;
};

/// Dense two-phase primal simplex. Dantzig pricing, switching to Bland's rule
/// after a run of degenerate pivots. Throws NumericalFailure when the final
/// primal or dual residuals exceed feasTol.
LpSolution solve_lp(const LpProblem& problem, double feasTol = 1e-9);

}  // namespace logcave
