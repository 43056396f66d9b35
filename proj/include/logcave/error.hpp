#pragma once

#include <stdexcept>
#include <string>

namespace logcave {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LP residuals could not be driven below the feasibility tolerance.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// A query point lies outside the convex hull of the samples.
class OutsideHull : public Error {
 public:
  using Error::Error;
};

/// Input points do not affinely span R^d (or repeat a point).
class DegenerateSampleSet : public Error {
 public:
  DegenerateSampleSet(const std::string& what, int rank) : Error(what), rank_(rank) {}
  int rank() const noexcept { return rank_; }

 private:
  int rank_;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Requested superlevel threshold exceeds the maximum of the density.
class DegenerateLevel : public Error {
 public:
  using Error::Error;
};

/// A volume backend could not certify its relative error.
class VolumeFailure : public Error {
 public:
  using Error::Error;
};

/// Hit-and-run could not move for a full sweep (zero-volume body).
class WalkStuck : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling exceeded its round cap.
class RetryExhausted : public Error {
 public:
  using Error::Error;
};

class NonFiniteObjective : public Error {
 public:
  using Error::Error;
};

class ToleranceNotMet : public Error {
 public:
  using Error::Error;
};

/// Finite-difference step crossed into a different tent subdivision.
class NeighborhoodCrossing : public Error {
 public:
  using Error::Error;
};

class DegenerateSupport : public Error {
 public:
  using Error::Error;
};

}  // namespace logcave
