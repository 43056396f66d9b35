#include "logcave/body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "logcave/error.hpp"

namespace logcave {
namespace {

constexpr int kBisectionSteps = 42;

double bisect_exit(const ConvexBody& body, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   double hi) {
  if (hi <= 0) return 0.0;
  if (body.contains(x + hi * u)) return hi;
  double lo = 0.0;
  for (int k = 0; k < kBisectionSteps; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (body.contains(x + mid * u)) lo = mid;
    else hi = mid;
  }
  return lo;
}

}  // namespace

double ball_volume(int d, double radius) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(radius, d);
}

std::pair<double, double> ball_chord(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& c, double r) {
  const Eigen::VectorXd w = x - c;
  const double b = u.dot(w);
  const double disc = b * b - (w.squaredNorm() - r * r);
  if (disc < 0) return {1.0, 0.0};
  const double s = std::sqrt(disc);
  return {-b - s, -b + s};
}

Box ConvexBody::bounding_box() const {
  const Ball in = inner_ball();
  const double R = outer_radius();
  return Box{in.center.array() - R, in.center.array() + R};
}

std::pair<double, double> ConvexBody::chord(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  const Ball in = inner_ball();
  const auto [lo, hi] = ball_chord(x, u, in.center, outer_radius());
  if (lo > hi) return {0.0, 0.0};
  return {-bisect_exit(*this, x, -u, -lo), bisect_exit(*this, x, u, hi)};
}

Separation ConvexBody::separate(const Eigen::VectorXd&) const {
  throw PreconditionViolation("body does not provide a separation oracle");
}

MembershipBody::MembershipBody(int dim, Predicate member, Ball inner, double outerRadius)
    : dim_(dim), member_(std::move(member)), inner_(std::move(inner)), outer_(outerRadius) {}

PolytopeBody::PolytopeBody(Eigen::MatrixXd A, Eigen::VectorXd b, Ball inner, double outerRadius,
                           bool exposeSeparation)
    : A_(std::move(A)), b_(std::move(b)), inner_(std::move(inner)), outer_(outerRadius),
      separation_(exposeSeparation) {}

PolytopeBody PolytopeBody::unit_cube(int d, bool exposeSeparation) {
  Eigen::MatrixXd A(2 * d, d);
  A << Eigen::MatrixXd::Identity(d, d), -Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd b(2 * d);
  b << Eigen::VectorXd::Ones(d), Eigen::VectorXd::Zero(d);
  return PolytopeBody(A, b, Ball{Eigen::VectorXd::Constant(d, 0.5), 0.5}, 0.5 * std::sqrt(double(d)),
                      exposeSeparation);
}

PolytopeBody PolytopeBody::standard_simplex(int d, bool exposeSeparation) {
  Eigen::MatrixXd A(d + 1, d);
  A << -Eigen::MatrixXd::Identity(d, d), Eigen::RowVectorXd::Ones(d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 1);
  b(d) = 1.0;
  const double r = 1.0 / (d + std::sqrt(double(d)));
  const double R = std::sqrt((1 - r) * (1 - r) + (d - 1) * r * r);
  return PolytopeBody(A, b, Ball{Eigen::VectorXd::Constant(d, r), r}, R, exposeSeparation);
}

bool PolytopeBody::contains(const Eigen::VectorXd& x) const {
  return ((A_ * x - b_).array() <= 0.0).all();
}

std::pair<double, double> PolytopeBody::chord(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd slack = b_ - A_ * x;
  const Eigen::VectorXd rate = A_ * u;
  for (Eigen::Index i = 0; i < rate.size(); ++i) {
    const double s = std::max(slack(i), 0.0);
    if (rate(i) > 0) hi = std::min(hi, s / rate(i));
    else if (rate(i) < 0) lo = std::max(lo, s / rate(i));
  }
  return {lo, hi};
}

Separation PolytopeBody::separate(const Eigen::VectorXd& x) const {
  if (!separation_) return ConvexBody::separate(x);
  Eigen::Index worst = 0;
  const Eigen::VectorXd violation = A_ * x - b_;
  if (violation.maxCoeff(&worst) <= 0) return Inside{};
  const double norm = A_.row(worst).norm();
  return Hyperplane{A_.row(worst).transpose() / norm, b_(worst) / norm};
}

TentLevelSet::TentLevelSet(const SampleSet& X, const Eigen::VectorXd& y, double logLevel, Ball inner)
    : X_(&X), y_(y), logLevel_(logLevel), inner_(std::move(inner)), outer_(0.0) {
  for (int i = 0; i < X.size(); ++i) outer_ = std::max(outer_, (X.points().col(i) - inner_.center).norm());
}

bool TentLevelSet::contains(const Eigen::VectorXd& x) const { return in_superlevel(*X_, y_, logLevel_, x); }

std::pair<double, double> TentLevelSet::chord(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  const auto up = superlevel_chord(*X_, y_, logLevel_, x, u);
  const auto down = superlevel_chord(*X_, y_, logLevel_, x, -u);
  return {down ? -*down : 0.0, up ? *up : 0.0};
}

Separation TentLevelSet::separate(const Eigen::VectorXd& x) const {
  return separation_oracle_log(*X_, y_, logLevel_, x);
}

BallSlice::BallSlice(const ConvexBody& body, Eigen::VectorXd center, double radius)
    : body_(&body), center_(std::move(center)), radius_(radius) {}

bool BallSlice::contains(const Eigen::VectorXd& x) const {
  return (x - center_).norm() <= radius_ && body_->contains(x);
}

Ball BallSlice::inner_ball() const {
  const Ball in = body_->inner_ball();
  const double gap = (in.center - center_).norm();
  return Ball{in.center, std::max(0.0, std::min(in.radius, radius_ - gap))};
}

double BallSlice::outer_radius() const {
  const Ball in = body_->inner_ball();
  const double gap = (in.center - center_).norm();
  return std::min(body_->outer_radius(), radius_ + gap);
}

std::pair<double, double> BallSlice::chord(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  const auto [blo, bhi] = ball_chord(x, u, center_, radius_);
  if (blo > bhi) return {0.0, 0.0};
  const auto [klo, khi] = body_->chord(x, u);
  return {std::min(0.0, std::max(blo, klo)), std::max(0.0, std::min(bhi, khi))};
}

}  // namespace logcave
