#include "report.hpp"

#include <fstream>

#include "csv.hpp"

namespace logcave::cli {

nlohmann::json points_json(const SampleSet& X) {
  nlohmann::json pts = nlohmann::json::array();
  for (int i = 0; i < X.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < X.dim(); ++k) row.push_back(X.points()(k, i));
    pts.push_back(std::move(row));
  }
  return pts;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

nlohmann::json fit_json(const FitReport& report, const SampleSet& X, const nlohmann::json& config,
                        double wallClock) {
  const FitDiagnostics& d = report.diagnostics;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : report.surrogateTrace) trace.push_back({t.iteration, t.surrogate});
  nlohmann::json j;
  j["schemaVersion"] = kSchemaVersion;
  j["complete"] = report.complete;
  j["dimension"] = X.dim();
  j["points"] = points_json(X);
  j["y"] = vector_json(report.yFinal.values());
  j["loglik"] = report.loglik;
  j["logPartition"] = report.logPartition;
  j["relErr"] = report.relErr;
  j["iterations"] = report.iterations;
  j["seed"] = report.seed;
  j["config"] = config;
  j["diagnostics"] = {
      {"acceptanceRate", d.acceptanceRate},
      {"proposals", d.proposals},
      {"projectionHits", d.projectionHits},
      {"boundaryStatistics", d.boundaryStatistics},
      {"samplerDelta", d.samplerDelta},
      {"stepConstant", d.stepConstant},
      {"stepSize", d.stepSize},
      {"projectionRadius", d.projectionRadius},
      {"theoreticalIterations", d.theoreticalIterations},
      {"maxLevels", d.maxLevels},
      {"certifyDelta", d.certifyDelta},
  };
  j["surrogateTrace"] = std::move(trace);
  j["wallClock"] = wallClock;
  return j;
}

StoredFit read_fit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    if (j.at("schemaVersion").get<int>() != kSchemaVersion) throw ParseError(path + ": unsupported schemaVersion");
    const auto rows = j.at("points").get<std::vector<std::vector<double>>>();
    const auto y = j.at("y").get<std::vector<double>>();
    if (rows.size() != y.size()) throw ParseError(path + ": points and y differ in length");
    StoredFit fit{SampleSet::from_rows(rows), Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())),
                  j.at("logPartition").get<double>(), j.value("relErr", 0.0), j.value("seed", std::uint64_t{0})};
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void append_manifest(const std::string& path, const nlohmann::json& entry) {
  std::ofstream out(path, std::ios::app);
  if (out) out << entry.dump() << '\n';
}

}  // namespace logcave::cli
