#pragma once

#include <cstdint>

#include "logcave/parallel.hpp"

namespace logcave {

enum class VolumeBackend {
  Auto,        // grid when d <= 3 and the body separates, Monte Carlo otherwise
  Grid,        // certified cell classification, d <= 3
  MonteCarlo,  // multiphase ball telescoping with hit-and-run
};

struct SamplerConfig {
  double delta = 0.05;
  double tau = 0.05;
  std::uint64_t seed = 0;
  /// Hit-and-run steps per emitted sample; 0 selects 100 d^2.
  int walkSteps = 0;
  VolumeBackend volumeBackend = VolumeBackend::Auto;
  /// Independent chains per Monte Carlo estimate. Results depend on this
  /// count but not on the execution policy.
  int chains = 16;
  Execution execution = Execution::Parallel;
  long long gridMaxCells = 2'000'000;

  /// Throws PreconditionViolation on out-of-range fields.
  void validate() const;
  int walk_steps(int d) const;
};

}  // namespace logcave
