#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <vector>

#include <Eigen/Core>

#include "logcave/rng.hpp"
#include "logcave/sample_set.hpp"

namespace testing {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

inline logcave::SampleSet line(const std::vector<double>& xs) {
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x});
  return logcave::SampleSet::from_rows(rows);
}

/// sup |F_emp - F| for the sample against a continuous CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double D = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    D = std::max({D, (static_cast<double>(i) + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return D;
}

/// Asymptotic one-sample KS critical value at the 1% level.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

/// CDF of the density proportional to exp(1 - 2t) on [0, 1].
inline double segment_tent_cdf(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return (std::exp(1.0) - std::exp(1.0 - 2.0 * t)) / (std::exp(1.0) - std::exp(-1.0));
}

/// ln of the integral of exp(1 - 2t) over [0, 1].
inline double segment_tent_log_partition() { return std::log((std::exp(1.0) - std::exp(-1.0)) / 2.0); }

/// Distinct sorted abscissae in [0, 1) with spacing at least gap.
inline std::vector<double> random_abscissae(int n, logcave::Rng& rng, double gap = 0.02) {
  for (;;) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (double& x : xs) x = rng.uniform();
    std::sort(xs.begin(), xs.end());
    bool ok = true;
    for (std::size_t i = 1; i < xs.size(); ++i) ok &= xs[i] - xs[i - 1] >= gap;
    if (ok) return xs;
  }
}

}  // namespace testing
