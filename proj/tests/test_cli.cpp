#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <doctest.h>
#include <json.hpp>

#include "commands.hpp"
#include "csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("logcave_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string file(const std::string& name, const std::string& contents) const {
    const fs::path p = dir / name;
    std::ofstream(p) << contents;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "logcave");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = logcave::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> r;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) r.push_back(l);
  return r;
}

}  // namespace

TEST_CASE("csv parsing and formatting") {
  std::istringstream in("a,b\n1,2.5\n\n-3e-2,+4\n");
  const auto t = logcave::cli::read_csv(in);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == -0.03);
  CHECK(t.rows[1][1] == 4.0);

  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(logcave::cli::read_csv(ragged), logcave::cli::ParseError);
  std::istringstream junk("1\nx\n");
  CHECK_THROWS_AS(logcave::cli::read_csv(junk), logcave::cli::ParseError);

  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
    CHECK(std::stod(logcave::cli::format_number(v)) == v);
  }
}

TEST_CASE("fit, eval, sample and partition round trip") {
  Workspace ws;
  const std::string manifest = ws.path("manifest.jsonl");
  const std::string data = ws.file("two.csv", "x\n0\n1\n");
  const std::string fitPath = ws.path("fit.json");

  const Result f = run({"fit", data, "--epsilon", "0.05", "--max-iters", "200", "--seed", "7", "--output", fitPath,
                        "--manifest", manifest});
  REQUIRE(f.code == 0);
  const json doc = json::parse(slurp(fitPath));
  CHECK(doc["schemaVersion"] == 1);
  CHECK(doc["complete"] == true);
  // Uniform is the MLE: y near 0, loglik within epsilon of 0.
  CHECK(std::abs(doc["y"][0].get<double>()) <= 0.3);
  CHECK(doc["loglik"].get<double>() >= -0.05 - 2 * std::log1p(3 * 0.001));
  CHECK(doc["loglik"].get<double>() <= 2 * std::log1p(3 * 0.001));
  CHECK(doc["seed"] == 7);

  const std::string queries = ws.file("q.csv", "0.5\n2\n0\n");
  const Result e = run({"eval", fitPath, queries, "--manifest", manifest});
  REQUIRE(e.code == 0);
  const auto rows = lines(e.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "density");
  CHECK(std::abs(std::stod(rows[1]) - 1.0) <= 0.3);
  CHECK(std::stod(rows[2]) == 0.0);
  const double pole = std::exp(doc["y"][0].get<double>() - doc["logPartition"].get<double>());
  CHECK(std::stod(rows[3]) == doctest::Approx(pole).epsilon(1e-12));

  const Result s = run({"sample", fitPath, "--count", "200", "--seed", "3", "--manifest", manifest});
  REQUIRE(s.code == 0);
  const auto draws = lines(s.out);
  REQUIRE(draws.size() == 201);
  CHECK(draws[0] == "x1");
  for (std::size_t i = 1; i < draws.size(); ++i) {
    const double v = std::stod(draws[i]);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  const std::string pts = ws.file("pts.csv", "0\n1\n");
  const Result p = run({"partition", "--points", pts, "--y", "1,-1", "--manifest", manifest});
  REQUIRE(p.code == 0);
  const json pj = json::parse(p.out);
  CHECK(std::abs(pj["logPartition"].get<double>() - 0.161439) <= std::log1p(3 * 0.02));
  CHECK(pj["relErr"].get<double>() > 0);

  const Result pf = run({"partition", fitPath, "--manifest", manifest});
  CHECK(pf.code == 0);

  const auto entries = lines(slurp(manifest));
  REQUIRE(entries.size() == 5);
  const json sampleEntry = json::parse(entries[2]);
  CHECK(sampleEntry["command"] == "sample");
  CHECK(sampleEntry["acceptanceRate"].get<double>() > 0.5);
  CHECK(sampleEntry["exitCode"] == 0);
  for (const auto& l : entries) {
    const json j = json::parse(l);
    for (const char* key : {"command", "input", "config", "seed", "version", "wallClock", "outcome"})
      CHECK(j.contains(key));
  }
}

TEST_CASE("fit is reproducible apart from wall clock") {
  Workspace ws;
  const std::string data = ws.file("three.csv", "0\n0.4\n1\n");
  auto once = [&](const std::string& name) {
    const std::string out = ws.path(name);
    REQUIRE(run({"fit", data, "--max-iters", "100", "--seed", "7", "-o", out, "--manifest", ws.path("m")}).code == 0);
    json j = json::parse(slurp(out));
    j.erase("wallClock");
    return j.dump();
  };
  CHECK(once("a.json") == once("b.json"));
}

TEST_CASE("exit codes") {
  Workspace ws;
  const std::string manifest = ws.path("m.jsonl");
  const Result degenerate = run({"fit", ws.file("one.csv", "0.5\n"), "--manifest", manifest});
  CHECK(degenerate.code == 3);
  CHECK(degenerate.err.find("affine rank 0") != std::string::npos);
  CHECK(run({"fit", ws.file("flat.csv", "0,0\n1,1\n2,2\n"), "--manifest", manifest}).code == 3);
  CHECK(run({"fit", ws.file("bad.csv", "0\n1\nfoo\n"), "--manifest", manifest}).code == 2);
  CHECK(run({"fit", ws.path("missing.csv"), "--manifest", manifest}).code == 2);
  CHECK(run({"fit", ws.file("ok.csv", "0\n1\n"), "--epsilon", "2", "--manifest", manifest}).code == 2);
  CHECK(run({"fit", "--bogus"}).code == 2);
  CHECK(run({"eval", ws.file("nofit.json", "{}"), ws.file("q.csv", "0\n"), "--manifest", manifest}).code == 2);
  CHECK(run({"partition", "--points", ws.file("p.csv", "0\n1\n"), "--y", "1,-1", "--delta", "0.1", "--manifest",
             manifest})
            .code == 2);
  CHECK(lines(slurp(manifest)).size() == 7);
}
