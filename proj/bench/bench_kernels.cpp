// Serial reference vs OpenMP kernels. Each pair must produce identical
// results; only the timings should differ.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include <omp.h>

#include "logcave/body.hpp"
#include "logcave/oracle.hpp"
#include "logcave/sampler.hpp"
#include "logcave/tent.hpp"
#include "logcave/volume.hpp"

using namespace logcave;

namespace {

double seconds(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-22s serial %8.3f s  parallel %8.3f s  speedup %5.2fx  %s\n", name, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0, same ? "identical" : "MISMATCH");
}

SampleSet random_points(int n, int d, Rng& rng) {
  Eigen::MatrixXd P(d, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < d; ++k) P(k, j) = rng.uniform();
  return SampleSet(P);
}

}  // namespace

int main(int argc, char** argv) try {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const double scale = argc > 1 ? std::atof(argv[1]) : 1.0;
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
  Rng rng(7);
  bool ok = true;

  {
    const SampleSet X = random_points(20, 2, rng);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) y(i) = rng.uniform(-1, 1);
    const int q = static_cast<int>(4000 * scale);
    Eigen::MatrixXd Q(2, q);
    for (int j = 0; j < q; ++j) Q.col(j) = X.point(static_cast<int>(rng.index(20)));
    for (int j = 0; j < q; ++j) Q.col(j) = 0.5 * Q.col(j) + 0.5 * X.centroid();
    std::vector<std::optional<double>> a, b;
    const double s = seconds([&] { a = tent_evaluate_batch(X, y, Q, Execution::Serial); });
    const double p = seconds([&] { b = tent_evaluate_batch(X, y, Q, Execution::Parallel); });
    ok &= a == b;
    report("tent batch (n=20,d=2)", s, p, a == b);
  }

  {
    const SampleSet X = SampleSet::from_rows({{0.0}, {0.4}, {1.0}, {1.7}});
    Eigen::VectorXd y(4);
    y << 0.5, 1.0, -0.5, -1.0;
    SamplerConfig cfg;
    cfg.delta = 0.01 / std::sqrt(scale);
    LogPartitionEstimate a, b;
    const double s = seconds([&] {
      cfg.execution = Execution::Serial;
      Rng r(1);
      a = estimate_log_partition(X, y, cfg, r);
    });
    const double p = seconds([&] {
      cfg.execution = Execution::Parallel;
      Rng r(1);
      b = estimate_log_partition(X, y, cfg, r);
    });
    const bool same = a.logPartition == b.logPartition;
    ok &= same;
    report("log-partition (d=1)", s, p, same);
  }

  {
    const PolytopeBody cube = PolytopeBody::unit_cube(2);
    const MembershipBody body(2, [&](const Eigen::VectorXd& x) { return cube.contains(x); }, cube.inner_ball(),
                              cube.outer_radius());
    SamplerConfig cfg;
    cfg.delta = 0.1;
    cfg.walkSteps = 10;
    VolumeEstimate a, b;
    const double s = seconds([&] {
      cfg.execution = Execution::Serial;
      Rng r(2);
      a = estimate_volume_mc(body, cfg, r);
    });
    const double p = seconds([&] {
      cfg.execution = Execution::Parallel;
      Rng r(2);
      b = estimate_volume_mc(body, cfg, r);
    });
    const bool same = a.volume == b.volume;
    ok &= same;
    report("MC volume (square)", s, p, same);
  }

  {
    const PolytopeBody simplex = PolytopeBody::standard_simplex(3, true);
    SamplerConfig cfg;
    cfg.delta = 0.05;
    VolumeEstimate a, b;
    const double s = seconds([&] {
      cfg.execution = Execution::Serial;
      a = estimate_volume_grid(simplex, cfg);
    });
    const double p = seconds([&] {
      cfg.execution = Execution::Parallel;
      b = estimate_volume_grid(simplex, cfg);
    });
    const bool same = a.volume == b.volume;
    ok &= same;
    report("grid volume (3-simplex)", s, p, same);
  }

  {
    const SampleSet X = SampleSet::from_rows({{0.0}, {0.5}, {1.5}});
    const double step = 0.05 / std::max(scale, 0.25);
    BruteForceResult a, b;
    const double s = seconds([&] { a = brute_force_mle(X, 5.0, step, Execution::Serial); });
    const double p = seconds([&] { b = brute_force_mle(X, 5.0, step, Execution::Parallel); });
    const bool same = a.yStar == b.yStar && a.loglik == b.loglik;
    ok &= same;
    report("brute-force MLE (n=3)", s, p, same);
  }

  return ok ? 0 : 1;
} catch (const std::exception& e) {
  std::fprintf(stderr, "logcave_bench: %s\n", e.what());
  return 2;
}
