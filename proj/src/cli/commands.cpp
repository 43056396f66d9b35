#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv.hpp"
#include "logcave/error.hpp"
#include "logcave/optimizer.hpp"
#include "logcave/sampler.hpp"
#include "logcave/tent.hpp"
#include "report.hpp"

#ifndef LOGCAVE_VERSION
#define LOGCAVE_VERSION "dev"
#endif

namespace logcave::cli {
namespace {

using Json = nlohmann::json;

struct Options {
  double epsilon = 0.1;
  double tau = 0.05;
  std::optional<std::uint64_t> seed;
  long long maxIters = 5000;
  std::optional<double> delta;
  int walkSteps = 0;
  std::string backend = "auto";
  std::string output = "-";
  std::string trace;
  double stepScale = 1.0;
  std::string manifest;
  long long count = 1;
  std::string points;
  std::string y;
};

/// Exit status plus what the manifest should say about it.
struct Outcome {
  int code = kOk;
  std::string status = "ok";
  Json extra = Json::object();
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("LOGCAVE_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("LOGCAVE_SEED is not an unsigned integer");
  }
  return 0;
}

VolumeBackend parse_backend(const std::string& name) {
  if (name == "grid") return VolumeBackend::Grid;
  if (name == "mc") return VolumeBackend::MonteCarlo;
  return VolumeBackend::Auto;
}

std::string manifest_path(const Options& o) {
  if (!o.manifest.empty()) return o.manifest;
  if (const char* env = std::getenv("LOGCAVE_MANIFEST")) return env;
  return "logcave_manifest.jsonl";
}

/// Writes to --output, or to `out` for "-".
void emit(const Options& o, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (o.output == "-" || o.output.empty()) {
    body(out);
    return;
  }
  std::ofstream file(o.output);
  if (!file) throw UsageError("cannot write " + o.output);
  body(file);
}

Json config_json(const Options& o, std::uint64_t seed) {
  Json c{{"epsilon", o.epsilon},   {"tau", o.tau},           {"seed", seed},
         {"maxIters", o.maxIters}, {"walkSteps", o.walkSteps}, {"volumeBackend", o.backend},
         {"stepScale", o.stepScale}};
  c["delta"] = o.delta ? Json(*o.delta) : Json(nullptr);
  return c;
}

SamplerConfig sampler_config(const Options& o, std::uint64_t seed, double defaultDelta) {
  SamplerConfig sc;
  sc.delta = o.delta.value_or(defaultDelta);
  sc.tau = o.tau;
  sc.seed = seed;
  sc.walkSteps = o.walkSteps;
  sc.volumeBackend = parse_backend(o.backend);
  sc.validate();
  return sc;
}

Eigen::VectorXd parse_heights(const std::string& arg) {
  std::vector<double> values;
  if (std::filesystem::exists(arg)) {
    for (const auto& row : read_csv_file(arg).rows) values.insert(values.end(), row.begin(), row.end());
  } else {
    std::istringstream in(arg);
    for (const auto& row : read_csv(in).rows) values.insert(values.end(), row.begin(), row.end());
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Outcome cmd_fit(const std::string& input, const Options& o, std::uint64_t seed, std::ostream& out,
                std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const CsvTable table = read_csv_file(input);
  const SampleSet X = SampleSet::from_rows(table.rows);

  SolverConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.tau = o.tau;
  cfg.maxIters = o.maxIters;
  cfg.stepScale = o.stepScale;
  cfg.samplerDelta = o.delta;
  cfg.sampler = sampler_config(o, seed, 0.05);
  // The trace costs one log-partition estimate per point; by default only
  // d = 1 fits, where that is cheap, record it.
  cfg.tracePoints = (!o.trace.empty() || X.dim() == 1) ? 50 : 0;
  try {
    cfg.validate();
  } catch (const PreconditionViolation& e) {
    throw UsageError(e.what());
  }

  const Json config = config_json(o, seed);
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  auto write_trace = [&](const FitReport& r) {
    if (o.trace.empty()) return;
    std::ofstream t(o.trace);
    if (!t) throw UsageError("cannot write " + o.trace);
    std::vector<std::vector<double>> rows;
    for (const auto& p : r.surrogateTrace) rows.push_back({static_cast<double>(p.iteration), p.surrogate});
    write_csv(t, rows, {"iteration", "surrogate"});
  };

  Rng rng(seed);
  try {
    const FitReport report = fit(X, cfg, rng);
    emit(o, out, [&](std::ostream& s) { s << fit_json(report, X, config, elapsed()).dump(2) << '\n'; });
    write_trace(report);
    return Outcome{kOk, "ok", {{"loglik", report.loglik}, {"iterations", report.iterations}}};
  } catch (const FitAborted& e) {
    err << "logcave fit: " << e.what() << '\n';
    emit(o, out, [&](std::ostream& s) { s << fit_json(e.partial(), X, config, elapsed()).dump(2) << '\n'; });
    write_trace(e.partial());
    return Outcome{kSolverFailure, "solver-failure", {{"error", e.what()}, {"iterations", e.partial().iterations}}};
  }
}

Outcome cmd_eval(const std::string& fitPath, const std::string& pointsPath, const Options& o, std::ostream& out) {
  const StoredFit f = read_fit(fitPath);
  const CsvTable table = read_csv_file(pointsPath);
  const int d = f.samples.dim();
  std::vector<std::vector<double>> rows;
  for (const auto& r : table.rows) {
    if (static_cast<int>(r.size()) != d) throw ParseError("query points must have " + std::to_string(d) + " columns");
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.data(), d);
    const auto h = tent_evaluate(f.samples, f.y, x);
    rows.push_back({h ? std::exp(*h - f.logPartition) : 0.0});
  }
  emit(o, out, [&](std::ostream& s) { write_csv(s, rows, {"density"}); });
  return Outcome{kOk, "ok", {{"points", rows.size()}}};
}

Outcome cmd_sample(const std::string& fitPath, const Options& o, std::uint64_t seed, std::ostream& out,
                   std::ostream& err) {
  const StoredFit f = read_fit(fitPath);
  if (o.count < 0) throw UsageError("--count must be nonnegative");
  const SamplerConfig sc = sampler_config(o, seed, 0.02);
  Rng rng(seed);
  LevelSetDecomposition dec = build_decomposition(f.samples, f.y, sc, rng);
  TentSampler sampler(f.samples, f.y, std::move(dec), sc, rng.split(1));
  std::vector<std::vector<double>> rows;
  for (long long i = 0; i < o.count; ++i) {
    const Eigen::VectorXd z = sampler.draw();
    rows.emplace_back(z.data(), z.data() + z.size());
  }
  std::vector<std::string> header;
  for (int k = 0; k < f.samples.dim(); ++k) header.push_back("x" + std::to_string(k + 1));
  emit(o, out, [&](std::ostream& s) { write_csv(s, rows, header); });
  err << "acceptance rate " << format_number(sampler.acceptance_rate()) << " over " << sampler.proposals()
      << " proposals\n";
  return Outcome{kOk, "ok", {{"acceptanceRate", sampler.acceptance_rate()}, {"proposals", sampler.proposals()}}};
}

Outcome cmd_partition(const std::string& fitPath, const Options& o, std::uint64_t seed, std::ostream& out) {
  std::optional<SampleSet> X;
  Eigen::VectorXd y;
  if (!fitPath.empty()) {
    StoredFit f = read_fit(fitPath);
    X.emplace(std::move(f.samples));
    y = f.y;
  } else {
    if (o.points.empty() || o.y.empty()) throw UsageError("partition needs a fit file or both --points and --y");
    X.emplace(SampleSet::from_rows(read_csv_file(o.points).rows));
    y = parse_heights(o.y);
    if (y.size() != X->size()) throw ParseError("--y must have one value per point");
  }
  const SamplerConfig sc = sampler_config(o, seed, 0.02);
  if (!(sc.delta < 1.0 / 16.0)) throw UsageError("partition needs --delta below 1/16");
  Rng rng(seed);
  const LogPartitionEstimate e = estimate_log_partition(*X, y, sc, rng);
  const Json j{{"schemaVersion", kSchemaVersion}, {"logPartition", e.logPartition}, {"relErr", e.relErr},
               {"acceptance", e.acceptance},      {"trials", e.trials},             {"levels", e.levels},
               {"delta", sc.delta},               {"tau", sc.tau},                  {"seed", seed}};
  emit(o, out, [&](std::ostream& s) { s << j.dump(2) << '\n'; });
  return Outcome{kOk, "ok", {{"logPartition", e.logPartition}, {"relErr", e.relErr}}};
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--tau", o.tau, "Failure probability")->capture_default_str();
  sub->add_option("--seed", o.seed, "RNG seed (falls back to LOGCAVE_SEED, then 0)");
  sub->add_option("--delta", o.delta, "Sampler accuracy");
  sub->add_option("--walk-steps", o.walkSteps, "Hit-and-run steps per sample (0: 100 d^2)")->check(CLI::NonNegativeNumber);
  sub->add_option("--volume-backend", o.backend, "Volume estimator")
      ->check(CLI::IsMember({"auto", "grid", "mc"}))
      ->capture_default_str();
  sub->add_option("--output,-o", o.output, "Output file, - for stdout")->capture_default_str();
  sub->add_option("--manifest", o.manifest, "Run manifest (JSON lines, appended)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Log-concave maximum likelihood estimation with tent densities", "logcave"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LOGCAVE_VERSION);

  Options o;
  std::string input;
  std::string fitPath;
  std::string pointsPath;

  CLI::App* fitCmd = app.add_subcommand("fit", "Fit the log-concave MLE to the points of a CSV file");
  fitCmd->add_option("input", input, "CSV with one point per row")->required();
  fitCmd->add_option("--epsilon", o.epsilon, "Target log-likelihood gap")->capture_default_str();
  fitCmd->add_option("--max-iters", o.maxIters, "Iteration cap (0: the full theoretical count)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fitCmd->add_option("--step-scale", o.stepScale, "Multiplier on the step size")->capture_default_str();
  fitCmd->add_option("--trace", o.trace, "Write the objective trace to this CSV");
  add_common(fitCmd, o);

  CLI::App* evalCmd = app.add_subcommand("eval", "Evaluate a fitted density at query points");
  evalCmd->add_option("fit", fitPath, "fit.json")->required();
  evalCmd->add_option("points", pointsPath, "CSV of query points")->required();
  add_common(evalCmd, o);

  CLI::App* sampleCmd = app.add_subcommand("sample", "Draw points from a fitted density");
  sampleCmd->add_option("fit", fitPath, "fit.json")->required();
  sampleCmd->add_option("--count,-n", o.count, "Number of draws")->capture_default_str();
  add_common(sampleCmd, o);

  CLI::App* partCmd = app.add_subcommand("partition", "Estimate the log-partition function of a tent");
  partCmd->add_option("fit", fitPath, "fit.json (or give --points and --y)");
  partCmd->add_option("--points", o.points, "CSV of sample points");
  partCmd->add_option("--y", o.y, "Tent heights: a CSV file or a comma-separated list");
  add_common(partCmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string command = app.get_subcommands().front()->get_name();
  Outcome result;
  std::uint64_t seed = 0;
  try {
    seed = resolve_seed(o);
    if (command == "fit") result = cmd_fit(input, o, seed, out, err);
    else if (command == "eval") result = cmd_eval(fitPath, pointsPath, o, out);
    else if (command == "sample") result = cmd_sample(fitPath, o, seed, out, err);
    else result = cmd_partition(fitPath, o, seed, out);
  } catch (const ParseError& e) {
    err << "logcave " << command << ": " << e.what() << '\n';
    result = Outcome{kUsage, "parse-error", {{"error", e.what()}}};
  } catch (const UsageError& e) {
    err << "logcave " << command << ": " << e.what() << '\n';
    result = Outcome{kUsage, "usage-error", {{"error", e.what()}}};
  } catch (const DegenerateSampleSet& e) {
    err << "logcave " << command << ": degenerate sample set: " << e.what() << '\n';
    result = Outcome{kDegenerate, "degenerate-sample-set", {{"error", e.what()}, {"rank", e.rank()}}};
  } catch (const PreconditionViolation& e) {
    err << "logcave " << command << ": " << e.what() << '\n';
    result = Outcome{kUsage, "usage-error", {{"error", e.what()}}};
  } catch (const Error& e) {
    err << "logcave " << command << ": " << e.what() << '\n';
    result = Outcome{kSolverFailure, "solver-failure", {{"error", e.what()}}};
  }

  Json entry{{"command", command},
             {"input", command == "fit" ? input : fitPath},
             {"config", config_json(o, seed)},
             {"seed", seed},
             {"version", LOGCAVE_VERSION},
             {"wallClock", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
             {"outcome", result.status},
             {"exitCode", result.code}};
  for (auto it = result.extra.begin(); it != result.extra.end(); ++it) entry[it.key()] = it.value();
  append_manifest(manifest_path(o), entry);
  return result.code;
}

}  // namespace logcave::cli
