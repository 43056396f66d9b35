#include "logcave/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "logcave/error.hpp"
#include "logcave/hit_and_run.hpp"
#include "logcave/parallel.hpp"

namespace logcave {
namespace {

constexpr int kMaxDoublings = 6;

VolumeEstimate interval_length(const ConvexBody& body) {
  const Ball in = body.inner_ball();
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(1);
  const auto [lo, hi] = body.chord(in.center, u);
  return VolumeEstimate{hi - lo, 0.0, 0};
}

enum class CellState { Inside, Outside, Boundary };

struct Cell {
  Eigen::VectorXd lower;
  double size;  // cells are cubes scaled by the box extents
};

}  // namespace

FractionEstimate estimate_fraction(const ConvexBody& body,
                                   const std::function<bool(const Eigen::VectorXd&)>& inSub,
                                   const Eigen::VectorXd& start, long long samples, int thin,
                                   const SamplerConfig& cfg, const Rng& rng) {
  const int chains = std::max(1, cfg.chains);
  const long long perChain = std::max<long long>(1, (samples + chains - 1) / chains);
  const int burnIn = cfg.walk_steps(body.dim());
  std::vector<long long> hits(chains, 0);
  parallel_for(cfg.execution, static_cast<std::size_t>(chains), [&](std::size_t c) {
    HitAndRun walk(body, start, rng.split(c));
    walk.advance(burnIn);
    long long count = 0;
    for (long long s = 0; s < perChain; ++s) {
      if (inSub(walk.advance(thin))) ++count;
    }
    hits[c] = count;
  });

  FractionEstimate out;
  out.samples = perChain * chains;
  double sum = 0.0;
  double sumSq = 0.0;
  for (long long h : hits) {
    const double f = static_cast<double>(h) / perChain;
    sum += f;
    sumSq += f * f;
  }
  out.fraction = sum / chains;
  if (chains > 1) {
    const double var = std::max(0.0, (sumSq - chains * out.fraction * out.fraction) / (chains - 1));
    out.stdErr = std::sqrt(var / chains);
  }
  // A binomial floor keeps a lucky run of identical chains from claiming zero error.
  const double p = std::clamp(out.fraction, 1.0 / out.samples, 1.0 - 1.0 / out.samples);
  out.stdErr = std::max(out.stdErr, std::sqrt(p * (1 - p) / out.samples));
  return out;
}

VolumeEstimate estimate_volume_mc(const ConvexBody& body, const SamplerConfig& cfg, Rng& rng) {
  const int d = body.dim();
  if (d == 1) return interval_length(body);
  const Ball in = body.inner_ball();
  const double R = body.outer_radius();
  if (!(in.radius > 0) || !(R >= in.radius)) throw VolumeFailure("body needs a nondegenerate inner ball");

  const int q = std::max(0, static_cast<int>(std::ceil(d * std::log2(R / in.radius) - 1e-12)));
  const double base = ball_volume(d, in.radius);
  if (q == 0) return VolumeEstimate{base, 0.0, 0};

  const double z = std::sqrt(2.0 * std::log(2.0 / cfg.tau));
  long long perPhase = static_cast<long long>(
      std::ceil(2.0 * std::log(2.0 * q / cfg.tau) * q / (cfg.delta * cfg.delta)));
  const int thin = d;

  const Rng root = rng.split(0x766f6cULL);
  rng.next();
  for (int round = 0; round <= kMaxDoublings; ++round, perPhase *= 2) {
    double logVolume = std::log(base);
    double variance = 0.0;
    long long used = 0;
    for (int j = 1; j <= q; ++j) {
      const double rho = in.radius * std::exp2(static_cast<double>(j) / d);
      const double rhoPrev = in.radius * std::exp2(static_cast<double>(j - 1) / d);
      const BallSlice slice(body, in.center, j == q ? std::max(rho, R) : rho);
      auto inPrev = [&](const Eigen::VectorXd& x) { return (x - in.center).norm() <= rhoPrev; };
      const FractionEstimate f = estimate_fraction(slice, inPrev, in.center, perPhase, thin, cfg,
                                                   root.split(static_cast<std::uint64_t>(round) * 1024 + j));
      if (f.fraction <= 0) throw VolumeFailure("telescoping phase produced no hits");
      logVolume -= std::log(f.fraction);
      variance += (f.stdErr / f.fraction) * (f.stdErr / f.fraction);
      used += f.samples;
    }
    const double relErr = std::expm1(z * std::sqrt(variance));
    if (relErr <= cfg.delta) return VolumeEstimate{std::exp(logVolume), relErr, used};
  }
  throw VolumeFailure("Monte Carlo volume did not reach relative error " + std::to_string(cfg.delta));
}

VolumeEstimate estimate_volume_grid(const ConvexBody& body, const SamplerConfig& cfg) {
  const int d = body.dim();
  if (d > 3) throw PreconditionViolation("grid volume backend supports d <= 3");
  if (!body.has_separation()) throw PreconditionViolation("grid volume backend needs a separation oracle");
  if (d == 1) return interval_length(body);

  const Box box = body.bounding_box();
  const Eigen::VectorXd extent = box.upper - box.lower;
  const double boxVolume = extent.prod();
  const int corners = 1 << d;

  auto corner = [&](const Cell& c, int k) {
    Eigen::VectorXd p = c.lower;
    for (int a = 0; a < d; ++a) {
      if (k & (1 << a)) p(a) += c.size * extent(a);
    }
    return p;
  };
  auto classify = [&](const Cell& c) {
    int inside = 0;
    for (int k = 0; k < corners; ++k) inside += body.contains(corner(c, k)) ? 1 : 0;
    if (inside == corners) return CellState::Inside;
    if (inside > 0) return CellState::Boundary;
    const Eigen::VectorXd mid = c.lower + 0.5 * c.size * extent;
    const Separation s = body.separate(mid);
    if (const auto* h = std::get_if<Hyperplane>(&s)) {
      for (int k = 0; k < corners; ++k) {
        if (!h->excludes(corner(c, k))) return CellState::Boundary;
      }
      return CellState::Outside;
    }
    return CellState::Boundary;
  };

  std::vector<Cell> frontier{Cell{box.lower, 1.0}};
  double insideVolume = 0.0;
  long long evaluated = 0;
  while (true) {
    std::vector<CellState> state(frontier.size());
    parallel_for(cfg.execution, frontier.size(), [&](std::size_t i) { state[i] = classify(frontier[i]); });
    evaluated += static_cast<long long>(frontier.size());

    std::vector<Cell> next;
    double boundaryVolume = 0.0;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const double v = std::pow(frontier[i].size, d) * boxVolume;
      if (state[i] == CellState::Inside) insideVolume += v;
      else if (state[i] == CellState::Boundary) boundaryVolume += v;
    }
    const double lower = insideVolume;
    const double upper = insideVolume + boundaryVolume;
    if (lower > 0 && (upper - lower) / (2 * lower) <= cfg.delta) {
      return VolumeEstimate{0.5 * (lower + upper), (upper - lower) / (2 * lower), evaluated};
    }
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      if (state[i] != CellState::Boundary) continue;
      const double half = 0.5 * frontier[i].size;
      for (int k = 0; k < corners; ++k) {
        Eigen::VectorXd lo = frontier[i].lower;
        for (int a = 0; a < d; ++a) {
          if (k & (1 << a)) lo(a) += half * extent(a);
        }
        next.push_back(Cell{lo, half});
      }
    }
    if (next.empty() || static_cast<long long>(next.size()) + evaluated > cfg.gridMaxCells) {
      throw VolumeFailure("grid volume exceeded its cell budget");
    }
    frontier = std::move(next);
  }
}

VolumeEstimate estimate_volume(const ConvexBody& body, const SamplerConfig& cfg, Rng& rng) {
  if (body.dim() == 1) return interval_length(body);
  switch (cfg.volumeBackend) {
    case VolumeBackend::Grid:
      return estimate_volume_grid(body, cfg);
    case VolumeBackend::MonteCarlo:
      return estimate_volume_mc(body, cfg, rng);
    case VolumeBackend::Auto:
      break;
  }
  if (body.dim() <= 3 && body.has_separation()) return estimate_volume_grid(body, cfg);
  return estimate_volume_mc(body, cfg, rng);
}

}  // namespace logcave
