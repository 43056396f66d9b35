#include "logcave/sample_set.hpp"

#include <algorithm>
#include <string>

#include <Eigen/QR>

#include "logcave/error.hpp"

namespace logcave {

int affine_rank(const Eigen::MatrixXd& points) {
  if (points.cols() < 2) return 0;
  Eigen::MatrixXd shifted = points.rightCols(points.cols() - 1).colwise() - points.col(0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(shifted);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

SampleSet::SampleSet(Eigen::MatrixXd points) : points_(std::move(points)) {
  const int d = dim();
  const int n = size();
  if (d < 1) throw DegenerateSampleSet("sample set has dimension zero", 0);
  if (!points_.allFinite()) throw PreconditionViolation("sample coordinates must be finite");

  const int rank = affine_rank(points_);
  if (n < d + 1) {
    throw DegenerateSampleSet("need at least d + 1 = " + std::to_string(d + 1) + " points, got " +
                                  std::to_string(n) + " (affine rank " + std::to_string(rank) + ")",
                              rank);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (points_.col(i) == points_.col(j)) {
        throw DegenerateSampleSet(
            "points " + std::to_string(i) + " and " + std::to_string(j) + " coincide (affine rank " +
                std::to_string(rank) + ")",
            rank);
      }
    }
  }
  if (rank < d) {
    throw DegenerateSampleSet("points do not affinely span R^" + std::to_string(d) +
                                  " (affine rank " + std::to_string(rank) + ")",
                              rank);
  }
  centroid_ = points_.rowwise().mean();
  lower_ = points_.rowwise().minCoeff();
  upper_ = points_.rowwise().maxCoeff();
}

SampleSet SampleSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DegenerateSampleSet("no points", 0);
  const auto d = rows.front().size();
  Eigen::MatrixXd points(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) throw PreconditionViolation("ragged point rows");
    for (std::size_t k = 0; k < d; ++k) points(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = rows[i][k];
  }
  return SampleSet(std::move(points));
}

}  // namespace logcave
