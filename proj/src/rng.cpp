#include "logcave/rng.hpp"

namespace logcave {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    0x6c6f6763u, 0x61766521u};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : Rng(seed, splitmix64(seed)) {}

Rng::Rng(std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key), engine_(make_engine(key)) {}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(seed_, splitmix64(key_ ^ splitmix64(stream + 0x51ED27ULL)));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() { return gauss_(engine_); }

std::size_t Rng::index(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

Eigen::VectorXd Rng::direction(int d) {
  Eigen::VectorXd u(d);
  if (d == 1) {
    u(0) = (engine_() >> 63) ? 1.0 : -1.0;
    return u;
  }
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) u(i) = normal();
    norm = u.norm();
  } while (norm < 1e-12);
  return u / norm;
}

}  // namespace logcave
