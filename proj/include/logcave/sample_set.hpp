#pragma once

#include <vector>

#include <Eigen/Core>

namespace logcave {

/// The n input points X_1..X_n in R^d, stored as the columns of a d x n matrix.
///
/// Construction validates that n >= d + 1, that no point repeats and that the
/// points affinely span R^d; otherwise DegenerateSampleSet is thrown carrying
/// the affine rank that was found.
class SampleSet {
 public:
  explicit SampleSet(Eigen::MatrixXd points);

  /// One inner vector per point.
  static SampleSet from_rows(const std::vector<std::vector<double>>& rows);

  int dim() const noexcept { return static_cast<int>(points_.rows()); }
  int size() const noexcept { return static_cast<int>(points_.cols()); }

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  Eigen::VectorXd point(int i) const { return points_.col(i); }

  const Eigen::VectorXd& centroid() const noexcept { return centroid_; }
  const Eigen::VectorXd& lower() const noexcept { return lower_; }
  const Eigen::VectorXd& upper() const noexcept { return upper_; }

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd centroid_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Affine rank of the columns of `points` (rank of the translated matrix).
int affine_rank(const Eigen::MatrixXd& points);

}  // namespace logcave
