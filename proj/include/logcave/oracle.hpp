#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "logcave/parallel.hpp"
#include "logcave/rng.hpp"
#include "logcave/sample_set.hpp"
#include "logcave/sampler_config.hpp"
#include "logcave/tent_model.hpp"

namespace logcave {

struct EnvelopeKnot {
  double x = 0.0;
  double y = 0.0;
  int index = 0;  // the sample point this knot came from
};

/// Upper concave envelope of the points (x_i, y_i), left to right. Points on
/// a straight piece of the envelope are not knots. Throws DegenerateSupport
/// when all x coincide.
std::vector<EnvelopeKnot> upper_envelope_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Envelope value at t; nullopt outside [min x, max x].
std::optional<double> envelope_value(const std::vector<EnvelopeKnot>& knots, double t);

/// ln of the integral of exp over [a, b] of the linear interpolation of ya, yb.
double log_segment_integral(double a, double b, double ya, double yb);

/// A(y) = ln of the integral of exp(h) in d = 1, from the envelope.
double exact_partition_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double exact_partition_1d(const SampleSet& X, const Eigen::VectorXd& y);

struct Partition2d {
  double logPartition = 0.0;
  double lower = 0.0;  // certified bounds on the integral of exp(h)
  double upper = 0.0;
  long long triangles = 0;
};

/// Integral of exp(h) over the hull in d = 2 by adaptive triangle refinement:
/// exp of the corner interpolant bounds each piece from below, exp of the
/// covering-LP majorant at its centroid from above. Refines until the
/// midpoint estimate is within relative error tol; ToleranceNotMet beyond
/// maxTriangles.
Partition2d exact_partition_2d(const SampleSet& X, const Eigen::VectorXd& y, double tol = 1e-8,
                               long long maxTriangles = 400000);

/// ln of the integral over a triangle of exp of the affine interpolant of
/// the corner values v.
double log_triangle_integral(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                             const Eigen::Vector3d& v);

struct BruteForceResult {
  Eigen::VectorXd yStar;
  double loglik = 0.0;
  long long evaluated = 0;
};

/// Exhaustive search over {y : 1^T y = 0, ||y||_inf <= gridRadius} with the
/// first n - 1 coordinates on a gridStep lattice. d <= 2.
BruteForceResult brute_force_mle(const SampleSet& X, double gridRadius, double gridStep,
                                 Execution policy = Execution::Parallel, double partitionTol = 1e-6);

/// log-likelihood sum_i h(X_i) - n A(y) in d = 1, from the envelope.
double loglik_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Central differences of A, projected onto {1^T v = 0}. Throws
/// NeighborhoodCrossing when y +- h e_i changes the envelope knots.
Eigen::VectorXd finite_difference_gradA(const SampleSet& X, const Eigen::VectorXd& y, double h);

/// Exact draws from the d = 1 tent density by inverting its CDF.
std::vector<double> sample_exact_1d(const SampleSet& X, const Eigen::VectorXd& y, std::size_t count, Rng& rng);

/// Squared Hellinger distance between f0 and the fitted density,
/// 1/2 (1 + int p) - int sqrt(f0 p) over the hull, with f0 assumed to
/// integrate to one. Adaptive Simpson in d = 1, adaptive triangles in d = 2.
double hellinger_check(const std::function<double(const Eigen::VectorXd&)>& f0, TentDensity& fitted,
                       const SamplerConfig& cfg, double tol = 1e-6);

}  // namespace logcave
