#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace logcave {

/// Seedable, splittable random source.
///
/// Every stream is identified by a 64-bit key; split() derives child keys
/// deterministically, so a computation that hands one child to each chain
/// produces the same numbers no matter how the chains are scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::size_t index(std::size_t n);
  /// Uniform direction on the unit sphere in R^d.
  Eigen::VectorXd direction(int d);

 private:
  Rng(std::uint64_t seed, std::uint64_t key);

  std::uint64_t seed_;
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_;
};

}  // namespace logcave
