#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "logcave/optimizer.hpp"
#include "logcave/sample_set.hpp"

namespace logcave::cli {

inline constexpr int kSchemaVersion = 1;

nlohmann::json points_json(const SampleSet& X);
nlohmann::json vector_json(const Eigen::VectorXd& v);

/// The fit.json document. wallClock is the only field that varies between
/// runs with the same inputs and seed.
nlohmann::json fit_json(const FitReport& report, const SampleSet& X, const nlohmann::json& config,
                        double wallClock);

struct StoredFit {
  SampleSet samples;
  Eigen::VectorXd y;
  double logPartition = 0.0;
  double relErr = 0.0;
  std::uint64_t seed = 0;
};

/// Throws ParseError for unreadable or inconsistent documents.
StoredFit read_fit(const std::string& path);

/// Appends one JSON line.
void append_manifest(const std::string& path, const nlohmann::json& entry);

}  // namespace logcave::cli
