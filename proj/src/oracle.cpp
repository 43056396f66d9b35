#include "logcave/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include <unsupported/Eigen/MatrixFunctions>

#include "logcave/error.hpp"
#include "logcave/tent.hpp"

namespace logcave {
namespace {

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double cross(const EnvelopeKnot& a, const EnvelopeKnot& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

/// Upper hull of points already sorted by x with distinct x.
void upper_hull_sorted(const double* xs, const double* ys, const int* ids, int n, std::vector<EnvelopeKnot>& out) {
  out.clear();
  for (int i = 0; i < n; ++i) {
    while (out.size() >= 2 && cross(out[out.size() - 2], out.back(), xs[i], ys[i]) >= 0) out.pop_back();
    out.push_back(EnvelopeKnot{xs[i], ys[i], ids[i]});
  }
}

double log_partition_knots(const std::vector<EnvelopeKnot>& k) {
  double acc = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    acc = log_add(acc, log_segment_integral(k[i].x, k[i + 1].x, k[i].y, k[i + 1].y));
  }
  return acc;
}

std::vector<int> knot_ids(const std::vector<EnvelopeKnot>& k) {
  std::vector<int> ids;
  for (const auto& knot : k) ids.push_back(knot.index);
  return ids;
}

/// Convex hull in counterclockwise order (monotone chain), collinear points dropped.
std::vector<Eigen::Vector2d> convex_hull_2d(const Eigen::MatrixXd& P) {
  std::vector<Eigen::Vector2d> pts;
  for (Eigen::Index i = 0; i < P.cols(); ++i) pts.emplace_back(P(0, i), P(1, i));
  std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto turn = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double triangle_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

double tent_at(const SampleSet& X, const Eigen::VectorXd& y, const Eigen::Vector2d& p) {
  const auto h = tent_evaluate(X, y, Eigen::VectorXd(p));
  if (!h) throw NumericalFailure("quadrature node fell outside the hull");
  return *h;
}

struct Piece {
  Eigen::Vector2d p[3];
  double h[3];
  double lower;  // integral of exp(h - shift), bounds
  double upper;
  double gap() const { return upper - lower; }
};

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15 * tol) return left + right + diff / 15;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 40);
}

/// Degree-2 edge-midpoint rule, refined by 4-splitting until the children agree.
double triangle_quadrature(const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b, const Eigen::Vector2d& c, double tol, int depth) {
  const Eigen::Vector2d ab = 0.5 * (a + b);
  const Eigen::Vector2d bc = 0.5 * (b + c);
  const Eigen::Vector2d ca = 0.5 * (c + a);
  const double area = triangle_area(a, b, c);
  auto rule = [&](const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r) {
    return triangle_area(p, q, r) / 3.0 * (f(0.5 * (p + q)) + f(0.5 * (q + r)) + f(0.5 * (r + p)));
  };
  const double whole = area / 3.0 * (f(ab) + f(bc) + f(ca));
  const double parts = rule(a, ab, ca) + rule(ab, b, bc) + rule(ca, bc, c) + rule(ab, bc, ca);
  if (depth <= 0 || std::abs(parts - whole) <= tol) return parts;
  return triangle_quadrature(f, a, ab, ca, 0.25 * tol, depth - 1) +
         triangle_quadrature(f, ab, b, bc, 0.25 * tol, depth - 1) +
         triangle_quadrature(f, ca, bc, c, 0.25 * tol, depth - 1) +
         triangle_quadrature(f, ab, bc, ca, 0.25 * tol, depth - 1);
}

}  // namespace

std::vector<EnvelopeKnot> upper_envelope_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.size());
  if (n == 0 || y.size() != n) throw PreconditionViolation("envelope needs matching, nonempty x and y");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return x(a) < x(b) || (x(a) == x(b) && y(a) > y(b)); });
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<int> ids;
  for (int i : order) {
    if (!xs.empty() && x(i) == xs.back()) continue;  // keep the highest pole at a repeated abscissa
    xs.push_back(x(i));
    ys.push_back(y(i));
    ids.push_back(i);
  }
  if (xs.size() < 2) throw DegenerateSupport("all sample points coincide");
  std::vector<EnvelopeKnot> knots;
  upper_hull_sorted(xs.data(), ys.data(), ids.data(), static_cast<int>(xs.size()), knots);
  return knots;
}

std::optional<double> envelope_value(const std::vector<EnvelopeKnot>& knots, double t) {
  if (knots.empty() || t < knots.front().x || t > knots.back().x) return std::nullopt;
  auto it = std::lower_bound(knots.begin(), knots.end(), t, [](const EnvelopeKnot& k, double v) { return k.x < v; });
  if (it == knots.begin()) return it->y;
  const EnvelopeKnot& b = *it;
  const EnvelopeKnot& a = *(it - 1);
  const double w = (t - a.x) / (b.x - a.x);
  return (1 - w) * a.y + w * b.y;
}

double log_segment_integral(double a, double b, double ya, double yb) {
  const double len = b - a;
  if (!(len > 0)) return -std::numeric_limits<double>::infinity();
  const double top = std::max(ya, yb);
  const double gap = std::abs(ya - yb);
  // ln((1 - e^{-gap}) / gap), with its series where the quotient cancels.
  const double shape = gap < 1e-8 ? -0.5 * gap : std::log(-std::expm1(-gap) / gap);
  return std::log(len) + top + shape;
}

double exact_partition_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return log_partition_knots(upper_envelope_1d(x, y));
}

double exact_partition_1d(const SampleSet& X, const Eigen::VectorXd& y) {
  if (X.dim() != 1) throw PreconditionViolation("exact_partition_1d needs d = 1");
  return exact_partition_1d(Eigen::VectorXd(X.points().row(0).transpose()), y);
}

double loglik_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto knots = upper_envelope_1d(x, y);
  double poles = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) poles += *envelope_value(knots, x(i));
  return poles - static_cast<double>(x.size()) * log_partition_knots(knots);
}

double log_triangle_integral(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                             const Eigen::Vector3d& v) {
  const double area = triangle_area(p0, p1, p2);
  if (!(area > 0)) return -std::numeric_limits<double>::infinity();
  const double top = v.maxCoeff();
  // exp of this bidiagonal matrix carries the divided difference exp[v0, v1, v2]
  // in its corner, confluent values included.
  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
  M.diagonal() = v.array() - top;
  M(0, 1) = 1.0;
  M(1, 2) = 1.0;
  const Eigen::Matrix3d E = M.exp();
  return std::log(2.0 * area * E(0, 2)) + top;
}

Partition2d exact_partition_2d(const SampleSet& X, const Eigen::VectorXd& y, double tol, long long maxTriangles) {
  if (X.dim() != 2) throw PreconditionViolation("exact_partition_2d needs d = 2");
  const double shift = y.maxCoeff();
  const auto hull = convex_hull_2d(X.points());

  auto make_piece = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c, double ha,
                        double hb, double hc) {
    Piece p{{a, b, c}, {ha, hb, hc}, 0.0, 0.0};
    p.lower = std::exp(log_triangle_integral(a, b, c, Eigen::Vector3d(ha, hb, hc) .array() - shift));
    const Eigen::Vector2d centroid = (a + b + c) / 3.0;
    const auto top = supporting_affine(X, y, Eigen::VectorXd(centroid));
    if (!top) throw NumericalFailure("centroid fell outside the hull");
    const Eigen::Vector3d av((*top)(Eigen::VectorXd(a)), (*top)(Eigen::VectorXd(b)), (*top)(Eigen::VectorXd(c)));
    p.upper = std::max(p.lower, std::exp(log_triangle_integral(a, b, c, av.array() - shift)));
    return p;
  };

  auto cmp = [](const Piece& a, const Piece& b) { return a.gap() < b.gap(); };
  std::priority_queue<Piece, std::vector<Piece>, decltype(cmp)> queue(cmp);
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> hv;
  for (const auto& v : hull) hv.push_back(tent_at(X, y, v));
  for (std::size_t i = 1; i + 1 < hull.size(); ++i) {
    Piece p = make_piece(hull[0], hull[i], hull[i + 1], hv[0], hv[i], hv[i + 1]);
    lower += p.lower;
    upper += p.upper;
    queue.push(std::move(p));
  }

  long long count = static_cast<long long>(queue.size());
  while (upper - lower > 2.0 * tol * lower) {
    if (count + 3 > maxTriangles) {
      throw ToleranceNotMet("2-d partition did not reach tolerance within the triangle budget");
    }
    Piece w = queue.top();
    queue.pop();
    lower -= w.lower;
    upper -= w.upper;
    const Eigen::Vector2d m01 = 0.5 * (w.p[0] + w.p[1]);
    const Eigen::Vector2d m12 = 0.5 * (w.p[1] + w.p[2]);
    const Eigen::Vector2d m20 = 0.5 * (w.p[2] + w.p[0]);
    const double h01 = tent_at(X, y, m01);
    const double h12 = tent_at(X, y, m12);
    const double h20 = tent_at(X, y, m20);
    Piece kids[4] = {make_piece(w.p[0], m01, m20, w.h[0], h01, h20), make_piece(m01, w.p[1], m12, h01, w.h[1], h12),
                     make_piece(m20, m12, w.p[2], h20, h12, w.h[2]), make_piece(m01, m12, m20, h01, h12, h20)};
    for (Piece& k : kids) {
      lower += k.lower;
      upper += k.upper;
      queue.push(std::move(k));
    }
    count += 3;
    lower = std::max(lower, 0.0);
  }

  Partition2d out;
  out.lower = lower * std::exp(shift);
  out.upper = upper * std::exp(shift);
  out.logPartition = std::log(0.5 * (lower + upper)) + shift;
  out.triangles = count;
  return out;
}

BruteForceResult brute_force_mle(const SampleSet& X, double gridRadius, double gridStep, Execution policy,
                                 double partitionTol) {
  const int d = X.dim();
  const int n = X.size();
  if (d > 2) throw PreconditionViolation("brute_force_mle supports d <= 2");
  if (!(gridRadius > 0 && gridStep > 0)) throw PreconditionViolation("grid radius and step must be positive");
  const long long G = static_cast<long long>(std::floor(2.0 * gridRadius / gridStep + 1e-9)) + 1;
  long long total = 1;
  for (int i = 0; i < n - 1; ++i) {
    if (total > (1LL << 40) / G) throw PreconditionViolation("brute-force grid is too large");
    total *= G;
  }

  // d = 1: points sorted once; each candidate scored from the envelope.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (d == 1) std::sort(order.begin(), order.end(), [&](int a, int b) { return X.points()(0, a) < X.points()(0, b); });
  std::vector<double> xs(n);
  std::vector<int> ids(n);
  for (int k = 0; k < n; ++k) {
    xs[k] = X.points()(0, order[k]);
    ids[k] = order[k];
  }

  auto candidate = [&](long long index, Eigen::VectorXd& yv) {
    double last = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      yv(i) = -gridRadius + static_cast<double>(index % G) * gridStep;
      index /= G;
      last -= yv(i);
    }
    yv(n - 1) = last;
    return std::abs(last) <= gridRadius + 1e-9;
  };
  auto score = [&](const Eigen::VectorXd& yv, std::vector<EnvelopeKnot>& knots, std::vector<double>& ys) {
    if (d == 1) {
      for (int k = 0; k < n; ++k) ys[k] = yv(order[k]);
      upper_hull_sorted(xs.data(), ys.data(), ids.data(), n, knots);
      double poles = 0.0;
      for (int k = 0; k < n; ++k) poles += *envelope_value(knots, xs[k]);
      return poles - n * log_partition_knots(knots);
    }
    double poles = 0.0;
    for (int i = 0; i < n; ++i) poles += *tent_evaluate(X, yv, X.point(i));
    return poles - n * exact_partition_2d(X, yv, partitionTol).logPartition;
  };

  const long long chunk = 4096;
  const long long chunks = (total + chunk - 1) / chunk;
  std::vector<double> bestScore(chunks, -std::numeric_limits<double>::infinity());
  std::vector<long long> bestIndex(chunks, -1);
  std::vector<long long> evaluated(chunks, 0);
  parallel_for(policy, static_cast<std::size_t>(chunks), [&](std::size_t c) {
    Eigen::VectorXd yv(n);
    std::vector<EnvelopeKnot> knots;
    knots.reserve(n);
    std::vector<double> ys(n);
    const long long end = std::min(total, static_cast<long long>(c + 1) * chunk);
    for (long long idx = static_cast<long long>(c) * chunk; idx < end; ++idx) {
      if (!candidate(idx, yv)) continue;
      const double s = score(yv, knots, ys);
      ++evaluated[c];
      if (s > bestScore[c]) {
        bestScore[c] = s;
        bestIndex[c] = idx;
      }
    }
  });

  BruteForceResult out;
  out.loglik = -std::numeric_limits<double>::infinity();
  long long best = -1;
  for (long long c = 0; c < chunks; ++c) {
    out.evaluated += evaluated[c];
    if (bestScore[c] > out.loglik) {
      out.loglik = bestScore[c];
      best = bestIndex[c];
    }
  }
  out.yStar.resize(n);
  if (best >= 0) candidate(best, out.yStar);
  return out;
}

Eigen::VectorXd finite_difference_gradA(const SampleSet& X, const Eigen::VectorXd& y, double h) {
  if (X.dim() != 1) throw PreconditionViolation("finite_difference_gradA needs d = 1");
  if (!(h > 0)) throw PreconditionViolation("finite-difference step must be positive");
  const Eigen::VectorXd x = X.points().row(0).transpose();
  const auto reference = knot_ids(upper_envelope_1d(x, y));
  const int n = X.size();
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd up = y;
    Eigen::VectorXd down = y;
    up(i) += h;
    down(i) -= h;
    const auto ku = upper_envelope_1d(x, up);
    const auto kd = upper_envelope_1d(x, down);
    if (knot_ids(ku) != reference || knot_ids(kd) != reference) {
      throw NeighborhoodCrossing("perturbing y changes the envelope knots");
    }
    g(i) = (log_partition_knots(ku) - log_partition_knots(kd)) / (2 * h);
  }
  return g.array() - g.mean();
}

std::vector<double> sample_exact_1d(const SampleSet& X, const Eigen::VectorXd& y, std::size_t count, Rng& rng) {
  if (X.dim() != 1) throw PreconditionViolation("sample_exact_1d needs d = 1");
  const auto knots = upper_envelope_1d(X.points().row(0).transpose(), y);
  const double logTotal = log_partition_knots(knots);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    acc += std::exp(log_segment_integral(knots[i].x, knots[i + 1].x, knots[i].y, knots[i + 1].y) - logTotal);
    cumulative.push_back(acc);
  }
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double u = rng.uniform() * cumulative.back();
    std::size_t seg = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    seg = std::min(seg, cumulative.size() - 1);
    const EnvelopeKnot& a = knots[seg];
    const EnvelopeKnot& b = knots[seg + 1];
    const double len = b.x - a.x;
    const double slope = (b.y - a.y) / len;
    const double v = rng.uniform();
    // Density on the segment is proportional to exp(slope t); measure t from
    // the higher end so the exponent stays nonpositive.
    double t;
    if (std::abs(slope * len) < 1e-12) {
      t = a.x + v * len;
    } else if (slope < 0) {
      t = a.x + std::log1p(v * std::expm1(slope * len)) / slope;
    } else {
      t = b.x + std::log1p(v * std::expm1(-slope * len)) / slope;
    }
    out.push_back(std::clamp(t, a.x, b.x));
  }
  return out;
}

double hellinger_check(const std::function<double(const Eigen::VectorXd&)>& f0, TentDensity& fitted,
                       const SamplerConfig& cfg, double tol) {
  const SampleSet& X = fitted.samples();
  const int d = X.dim();
  if (d > 2) throw PreconditionViolation("hellinger_check supports d <= 2");
  fitted.log_partition(cfg);
  auto p = [&](const Eigen::VectorXd& x) { return tent_density_value(fitted, x, cfg); };
  double massP = 0.0;
  double affinity = 0.0;
  if (d == 1) {
    std::vector<double> cuts(X.points().data(), X.points().data() + X.size());
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      auto pv = [&](double t) { return p(Eigen::VectorXd::Constant(1, t)); };
      auto av = [&](double t) {
        const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, t);
        return std::sqrt(std::max(0.0, f0(x)) * p(x));
      };
      massP += simpson(pv, cuts[i], cuts[i + 1], tol);
      affinity += simpson(av, cuts[i], cuts[i + 1], tol);
    }
  } else {
    const auto hull = convex_hull_2d(X.points());
    auto pv = [&](const Eigen::Vector2d& x) { return p(Eigen::VectorXd(x)); };
    auto av = [&](const Eigen::Vector2d& x) {
      const Eigen::VectorXd q(x);
      return std::sqrt(std::max(0.0, f0(q)) * p(q));
    };
    for (std::size_t i = 1; i + 1 < hull.size(); ++i) {
      massP += triangle_quadrature(pv, hull[0], hull[i], hull[i + 1], tol, 8);
      affinity += triangle_quadrature(av, hull[0], hull[i], hull[i + 1], tol, 8);
    }
  }
  return std::max(0.0, 0.5 * (1.0 + massP) - affinity);
}

}  // namespace logcave
