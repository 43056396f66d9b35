#include "logcave/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "logcave/error.hpp"

namespace logcave {
namespace {

constexpr double kPivotTol = 1e-11;

/// Dense tableau B^{-1} [S | b] over the standard-form matrix S.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& S, const Eigen::VectorXd& b, std::vector<int> basis)
      : rows_(static_cast<int>(S.rows())), cols_(static_cast<int>(S.cols())), basis_(std::move(basis)) {
    data_.resize(static_cast<std::size_t>(rows_) * (cols_ + 1));
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) at(i, j) = S(i, j);
      at(i, cols_) = b(i);
    }
  }

  /// Rebuild from a factorization of the current basis to shed pivot drift.
  void refactor(const Eigen::MatrixXd& S, const Eigen::VectorXd& b) {
    Eigen::MatrixXd B(rows_, rows_);
    for (int i = 0; i < rows_; ++i) B.col(i) = S.col(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    Eigen::MatrixXd body = lu.solve(S);
    Eigen::VectorXd rhs = lu.solve(b);
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) at(i, j) = body(i, j);
      at(i, cols_) = rhs(i);
      at(i, basis_[i]) = 1.0;
    }
  }

  double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * (cols_ + 1) + j]; }
  double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * (cols_ + 1) + j]; }
  double rhs(int i) const { return at(i, cols_); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<int>& basis() const { return basis_; }
  int basic(int i) const { return basis_[i]; }

  void pivot(int r, int q) {
    const double inv = 1.0 / at(r, q);
    for (int j = 0; j <= cols_; ++j) at(r, j) *= inv;
    at(r, q) = 1.0;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, q);
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, q) = 0.0;
    }
    basis_[r] = q;
  }

  double reduced_cost(const std::vector<double>& cost, int j) const {
    double z = cost[j];
    for (int i = 0; i < rows_; ++i) z -= cost[basis_[i]] * at(i, j);
    return z;
  }

 private:
  int rows_;
  int cols_;
  std::vector<int> basis_;
  std::vector<double> data_;
};

enum class PhaseResult { Optimal, Unbounded };

/// Maximizes cost over the tableau. Columns with allowed[j] == false never enter.
PhaseResult run_phase(Tableau& T, const std::vector<double>& cost, const std::vector<bool>& allowed,
                      double priceTol, int& pivots) {
  const int m = T.rows();
  const int N = T.cols();
  const int cap = 100 * (m + N) + 1000;
  bool bland = false;
  int degenerateRun = 0;
  std::vector<bool> isBasic(N, false);

  for (int iter = 0;; ++iter) {
    if (iter > cap) throw NumericalFailure("simplex iteration cap reached");
    std::fill(isBasic.begin(), isBasic.end(), false);
    for (int i = 0; i < m; ++i) isBasic[T.basic(i)] = true;

    int entering = -1;
    double best = priceTol;
    for (int j = 0; j < N; ++j) {
      if (!allowed[j] || isBasic[j]) continue;
      const double r = T.reduced_cost(cost, j);
      if (r > best) {
        entering = j;
        best = r;
        if (bland) break;
      }
    }
    if (entering < 0) return PhaseResult::Optimal;

    int leaving = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = T.at(i, entering);
      if (a <= kPivotTol) continue;
      const double r = std::max(T.rhs(i), 0.0) / a;
      if (leaving < 0) {
        leaving = i;
        ratio = r;
        continue;
      }
      const double slack = 1e-12 * std::max(1.0, ratio);
      if (r < ratio - slack) {
        leaving = i;
        ratio = r;
      } else if (r <= ratio + slack) {
        // Ties: Bland picks the smallest basic index; otherwise the larger pivot.
        const bool better = bland ? T.basic(i) < T.basic(leaving) : a > T.at(leaving, entering);
        if (better) leaving = i;
      }
    }
    if (leaving < 0) return PhaseResult::Unbounded;

    degenerateRun = (ratio <= 1e-12) ? degenerateRun + 1 : 0;
    if (degenerateRun > 2 * (m + N)) bland = true;
    T.pivot(leaving, entering);
    ++pivots;
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, double feasTol) {
  const int m = static_cast<int>(problem.constraints.rows());
  const int nv = static_cast<int>(problem.constraints.cols());
  if (problem.objective.size() != nv || problem.rhs.size() != m ||
      static_cast<int>(problem.senses.size()) != m) {
    throw PreconditionViolation("solve_lp: inconsistent problem dimensions");
  }
  if (!problem.objective.allFinite() || !problem.constraints.allFinite() || !problem.rhs.allFinite()) {
    throw PreconditionViolation("solve_lp: non-finite coefficients");
  }

  // Standard form: flip rows so b >= 0, add slack/surplus columns, then artificials.
  std::vector<double> rowSign(m, 1.0);
  std::vector<RowSense> sense(problem.senses);
  int nSlack = 0;
  int nArt = 0;
  for (int i = 0; i < m; ++i) {
    if (problem.rhs(i) < 0) {
      rowSign[i] = -1.0;
      if (sense[i] == RowSense::LessEqual) sense[i] = RowSense::GreaterEqual;
      else if (sense[i] == RowSense::GreaterEqual) sense[i] = RowSense::LessEqual;
    }
    if (sense[i] != RowSense::Equal) ++nSlack;
    if (sense[i] != RowSense::LessEqual) ++nArt;
  }
  const int N = nv + nSlack + nArt;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, N);
  Eigen::VectorXd b(m);
  std::vector<int> basis(m, -1);
  std::vector<bool> artificial(N, false);
  {
    int slack = nv;
    int art = nv + nSlack;
    for (int i = 0; i < m; ++i) {
      S.row(i).head(nv) = rowSign[i] * problem.constraints.row(i);
      b(i) = rowSign[i] * problem.rhs(i);
      if (sense[i] == RowSense::LessEqual) {
        S(i, slack) = 1.0;
        basis[i] = slack++;
      } else {
        if (sense[i] == RowSense::GreaterEqual) S(i, slack++) = -1.0;
        S(i, art) = 1.0;
        artificial[art] = true;
        basis[i] = art++;
      }
    }
  }

  const double bScale = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  const double cScale = 1.0 + (nv > 0 ? problem.objective.cwiseAbs().maxCoeff() : 0.0);
  const double priceTol = 1e-11 * cScale;

  LpSolution sol;
  Tableau T(S, b, basis);

  auto dual_for = [&](const std::vector<double>& cost) {
    Eigen::MatrixXd B(m, m);
    Eigen::VectorXd cB(m);
    for (int i = 0; i < m; ++i) {
      B.col(i) = S.col(T.basic(i));
      cB(i) = cost[T.basic(i)];
    }
    return Eigen::VectorXd(B.transpose().partialPivLu().solve(cB));
  };

  if (nArt > 0) {
    std::vector<double> phase1(N, 0.0);
    for (int j = 0; j < N; ++j) if (artificial[j]) phase1[j] = -1.0;
    std::vector<bool> allowed(N, true);
    run_phase(T, phase1, allowed, 1e-11, sol.pivots);
    T.refactor(S, b);
    double infeasibility = 0.0;
    for (int i = 0; i < m; ++i) if (artificial[T.basic(i)]) infeasibility += std::max(T.rhs(i), 0.0);
    if (infeasibility > feasTol * bScale) {
      const Eigen::VectorXd mu = dual_for(phase1);
      sol.status = LpStatus::Infeasible;
      sol.dual.resize(m);
      for (int i = 0; i < m; ++i) sol.dual(i) = rowSign[i] * mu(i);
      sol.primal = Eigen::VectorXd::Zero(nv);
      return sol;
    }
    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and keep their artificial at zero.
    for (int i = 0; i < m; ++i) {
      if (!artificial[T.basic(i)]) continue;
      int best = -1;
      double bestAbs = 1e-9;
      for (int j = 0; j < N; ++j) {
        if (artificial[j]) continue;
        if (std::abs(T.at(i, j)) > bestAbs) {
          bestAbs = std::abs(T.at(i, j));
          best = j;
        }
      }
      if (best >= 0) {
        T.pivot(i, best);
        ++sol.pivots;
      }
    }
  }

  std::vector<double> cost(N, 0.0);
  const double direction = problem.maximize ? 1.0 : -1.0;
  for (int j = 0; j < nv; ++j) cost[j] = direction * problem.objective(j);
  std::vector<bool> allowed(N, true);
  for (int j = 0; j < N; ++j) allowed[j] = !artificial[j];

  for (int attempt = 0;; ++attempt) {
    if (run_phase(T, cost, allowed, priceTol, sol.pivots) == PhaseResult::Unbounded) {
      sol.status = LpStatus::Unbounded;
      sol.primal = Eigen::VectorXd::Zero(nv);
      for (int i = 0; i < m; ++i) if (T.basic(i) < nv) sol.primal(T.basic(i)) = T.rhs(i);
      return sol;
    }
    T.refactor(S, b);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    for (int i = 0; i < m; ++i) x(T.basic(i)) = T.rhs(i);
    const Eigen::VectorXd lambda = dual_for(cost);

    double primalResidual = (S * x - b).cwiseAbs().maxCoeff();
    double negativity = std::max(0.0, -x.minCoeff());
    double dualResidual = 0.0;
    double complementarity = 0.0;
    bool alternative = false;
    std::vector<bool> isBasic(N, false);
    for (int i = 0; i < m; ++i) isBasic[T.basic(i)] = true;
    for (int j = 0; j < N; ++j) {
      if (artificial[j]) continue;
      const double d = cost[j] - S.col(j).dot(lambda);
      dualResidual = std::max(dualResidual, d);
      complementarity = std::max(complementarity, std::abs(d * x(j)));
      if (!isBasic[j] && std::abs(d) <= 1e-9 * cScale) alternative = true;
    }
    const bool ok = primalResidual <= feasTol * bScale && negativity <= feasTol * bScale &&
                    dualResidual <= feasTol * cScale && complementarity <= feasTol * bScale * cScale;
    if (!ok) {
      if (attempt < 3) continue;
      throw NumericalFailure("solve_lp: residuals above tolerance (primal " +
                             std::to_string(primalResidual) + ", dual " + std::to_string(dualResidual) +
                             ")");
    }

    sol.status = LpStatus::Optimal;
    sol.primal = x.head(nv).cwiseMax(0.0);
    sol.dual.resize(m);
    for (int i = 0; i < m; ++i) sol.dual(i) = direction * rowSign[i] * lambda(i);
    sol.objective = problem.objective.dot(sol.primal);
    sol.alternativeOptima = alternative;
    return sol;
  }
}

}  // namespace logcave
