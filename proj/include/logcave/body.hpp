#pragma once

#include <functional>
#include <utility>

#include <Eigen/Core>

#include "logcave/sample_set.hpp"
#include "logcave/tent.hpp"

namespace logcave {

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;
};

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// A full-dimensional convex body known through oracles. The inner ball must
/// lie inside the body and the body inside the ball of outer_radius() around
/// the same center.
class ConvexBody {
 public:
  virtual ~ConvexBody() = default;

  virtual int dim() const = 0;
  virtual bool contains(const Eigen::VectorXd& x) const = 0;
  virtual Ball inner_ball() const = 0;
  virtual double outer_radius() const = 0;
  virtual Box bounding_box() const;

  /// The interval {t : x + t u in K} as (lo, hi) with lo <= 0 <= hi, for a
  /// point x in K and unit u. The default bisects on contains().
  virtual std::pair<double, double> chord(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;

  virtual bool has_separation() const { return false; }
  /// Only meaningful when has_separation().
  virtual Separation separate(const Eigen::VectorXd& x) const;
};

/// A body given by a membership predicate alone.
class MembershipBody : public ConvexBody {
 public:
  using Predicate = std::function<bool(const Eigen::VectorXd&)>;
  MembershipBody(int dim, Predicate member, Ball inner, double outerRadius);

  int dim() const override { return dim_; }
  bool contains(const Eigen::VectorXd& x) const override { return member_(x); }
  Ball inner_ball() const override { return inner_; }
  double outer_radius() const override { return outer_; }

 private:
  int dim_;
  Predicate member_;
  Ball inner_;
  double outer_;
};

/// {x : A x <= b}. Chords are exact; separation is exposed only on request.
class PolytopeBody : public ConvexBody {
 public:
  PolytopeBody(Eigen::MatrixXd A, Eigen::VectorXd b, Ball inner, double outerRadius,
               bool exposeSeparation = false);

  /// The cube [0,1]^d.
  static PolytopeBody unit_cube(int d, bool exposeSeparation = false);
  /// The simplex {x >= 0, sum x <= 1}, with its inscribed ball.
  static PolytopeBody standard_simplex(int d, bool exposeSeparation = false);

  int dim() const override { return static_cast<int>(A_.cols()); }
  bool contains(const Eigen::VectorXd& x) const override;
  Ball inner_ball() const override { return inner_; }
  double outer_radius() const override { return outer_; }
  std::pair<double, double> chord(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;
  bool has_separation() const override { return separation_; }
  Separation separate(const Eigen::VectorXd& x) const override;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Ball inner_;
  double outer_;
  bool separation_;
};

/// The superlevel set {x : h_{X,y}(x) >= logLevel} of a tent, with LP chords
/// and the covering-LP separation oracle.
class TentLevelSet : public ConvexBody {
 public:
  TentLevelSet(const SampleSet& X, const Eigen::VectorXd& y, double logLevel, Ball inner);

  int dim() const override { return X_->dim(); }
  bool contains(const Eigen::VectorXd& x) const override;
  Ball inner_ball() const override { return inner_; }
  double outer_radius() const override { return outer_; }
  Box bounding_box() const override { return Box{X_->lower(), X_->upper()}; }
  std::pair<double, double> chord(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;
  bool has_separation() const override { return true; }
  Separation separate(const Eigen::VectorXd& x) const override;

  double log_level() const { return logLevel_; }

 private:
  const SampleSet* X_;
  Eigen::VectorXd y_;
  double logLevel_;
  Ball inner_;
  double outer_;
};

/// K intersected with the ball B(center, radius).
class BallSlice : public ConvexBody {
 public:
  BallSlice(const ConvexBody& body, Eigen::VectorXd center, double radius);

  int dim() const override { return body_->dim(); }
  bool contains(const Eigen::VectorXd& x) const override;
  Ball inner_ball() const override;
  double outer_radius() const override;
  std::pair<double, double> chord(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;

 private:
  const ConvexBody* body_;
  Eigen::VectorXd center_;
  double radius_;
};

/// Volume of the Euclidean ball of the given radius in R^d.
double ball_volume(int d, double radius);

/// Parameter interval {t : |x + t u - c| <= r} for unit u; empty pair (1, 0)
/// when the line misses the ball.
std::pair<double, double> ball_chord(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& c, double r);

}  // namespace logcave
