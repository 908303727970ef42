#include "isodiam/meb.hpp"

#include "isodiam/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace isodiam {

nlohmann::json EnclosingBall::to_json() const {
  return {{"center", std::vector<double>(center.data(), center.data() + center.size())},
          {"radius", radius},
          {"attainment_indices", attainment}};
}

namespace {

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;

template <int D>
struct Ball {
  Vec<D> c = Vec<D>::Zero();
  double r2 = -1.0;  // empty ball

  bool contains(const Vec<D>& p) const {
    const double slack = 1e-12 * std::max(r2, 0.0) + 1e-300;
    return (p - c).squaredNorm() <= r2 + slack;
  }
};

// Smallest ball with all support points on its boundary (circumball in their affine hull).
template <int D>
Ball<D> support_ball(const std::vector<Vec<D>>& s) {
  Ball<D> b;
  if (s.empty()) return b;
  if (s.size() == 1) {
    b.c = s[0];
    b.r2 = 0.0;
    return b;
  }
  const int m = static_cast<int>(s.size()) - 1;
  Eigen::MatrixXd gram(m, m);
  Eigen::VectorXd rhs(m);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) gram(j, k) = 2.0 * (s[j + 1] - s[0]).dot(s[k + 1] - s[0]);
    rhs[j] = (s[j + 1] - s[0]).squaredNorm();
  }
  const Eigen::VectorXd lambda = gram.completeOrthogonalDecomposition().solve(rhs);
  b.c = s[0];
  for (int j = 0; j < m; ++j) b.c += lambda[j] * (s[j + 1] - s[0]);
  b.r2 = 0.0;
  for (const auto& p : s) b.r2 = std::max(b.r2, (p - b.c).squaredNorm());
  return b;
}

template <int D>
Ball<D> brute_force(const std::vector<Vec<D>>& pts) {
  const int n = static_cast<int>(pts.size());
  Ball<D> best;
  best.r2 = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<Vec<D>>& s) {
    const Ball<D> b = support_ball<D>(s);
    if (b.r2 >= best.r2) return;
    for (const auto& p : pts)
      if (!b.contains(p)) return;
    best = b;
  };
  consider({pts[0]});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      consider({pts[i], pts[j]});
      for (int k = j + 1; k < n; ++k) {
        consider({pts[i], pts[j], pts[k]});
        if constexpr (D == 3)
          for (int l = k + 1; l < n; ++l) consider({pts[i], pts[j], pts[k], pts[l]});
      }
    }
  return best;
}

template <int D>
struct MoveToFront {
  std::vector<Vec<D>> points;
  std::vector<std::size_t> order;
  std::vector<Vec<D>> support;

  Ball<D> run(std::size_t end) {
    Ball<D> b = support_ball<D>(support);
    if (support.size() == D + 1) return b;
    for (std::size_t i = 0; i < end; ++i) {
      const Vec<D>& p = points[order[i]];
      if (b.contains(p)) continue;
      support.push_back(p);
      b = run(i);
      support.pop_back();
      std::rotate(order.begin(), order.begin() + i, order.begin() + i + 1);
    }
    return b;
  }
};

template <int D>
EnclosingBall welzl_impl(const std::vector<Vec<D>>& pts, std::uint64_t seed) {
  if (pts.empty()) throw Error(ErrorCode::InvalidArgument, "welzl needs at least one point");
  Ball<D> b;
  if (pts.size() < 16) {
    b = brute_force<D>(pts);
  } else {
    MoveToFront<D> mtf{pts, std::vector<std::size_t>(pts.size()), {}};
    std::iota(mtf.order.begin(), mtf.order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(mtf.order.begin(), mtf.order.end(), rng);
    b = mtf.run(pts.size());
  }
  EnclosingBall out;
  out.center = b.c;
  double r = 0.0;
  for (const auto& p : pts) r = std::max(r, (p - b.c).norm());
  out.radius = r;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if ((pts[i] - b.c).norm() >= r - kAttainRel * r) out.attainment.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

EnclosingBall welzl(const std::vector<Point>& points, std::uint64_t seed) {
  return welzl_impl<2>(std::vector<Vec<2>>(points.begin(), points.end()), seed);
}

EnclosingBall welzl(const std::vector<Point3>& points, std::uint64_t seed) {
  return welzl_impl<3>(std::vector<Vec<3>>(points.begin(), points.end()), seed);
}

// ---------------------------------------------------------------------------

namespace {

struct SoftMax {
  double value;
  Vec2 direction;  // -g^{-1} grad, a chart vector
};

SoftMax softmax_objective(const std::vector<Point>& pts, const ManifoldBackend& m, const Point& c, double beta,
                          bool with_direction) {
  const std::size_t n = pts.size();
  std::vector<double> d(n);
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = m.distance(c, pts[i]);
    dmax = std::max(dmax, d[i]);
  }
  double z = 0.0;
  for (double di : d) z += std::exp(beta * (di - dmax));
  SoftMax out{dmax + std::log(z) / beta, Vec2::Zero()};
  if (!with_direction) return out;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] == 0.0) continue;
    const double w = std::exp(beta * (d[i] - dmax)) / z;
    out.direction += w * m.log_map(c, pts[i]) / d[i];
  }
  return out;
}

double max_distance(const std::vector<Point>& pts, const ManifoldBackend& m, const Point& c) {
  double r = 0.0;
  for (const Point& p : pts) r = std::max(r, m.distance(c, p));
  return r;
}

}  // namespace

EnclosingBall geodesic_one_center(const std::vector<Point>& pts, const ManifoldBackend& m,
                                  const OneCenterOptions& opts, const std::optional<Point>& warm_start) {
  if (pts.empty()) throw Error(ErrorCode::InvalidArgument, "one-centre needs at least one point");
  Point c;
  if (warm_start) {
    c = *warm_start;
  } else {
    c = Point::Zero();
    for (const Point& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    if (!m.in_chart(c)) c = pts[0];

    double diam = 0.0;
    for (const Point& p : pts) diam = std::max(diam, m.distance(pts[0], p));
    if (diam > 0.0) {
      double beta = opts.beta_scale / diam;
      for (int stage = 0; stage < opts.stages; ++stage, beta *= 2.0) {
        SoftMax f = softmax_objective(pts, m, c, beta, true);
        for (int it = 0; it < opts.descent_iterations; ++it) {
          const double slope = m.norm(c, f.direction);
          if (slope < 1e-10) break;
          double t = 1.0;
          bool accepted = false;
          while (t > 1e-12) {
            const Point trial = c + t * f.direction;
            if (m.in_chart(trial)) {
              const SoftMax ft = softmax_objective(pts, m, trial, beta, false);
              if (ft.value <= f.value - 1e-4 * t * slope * slope) {
                c = trial;
                f = softmax_objective(pts, m, c, beta, true);
                accepted = true;
                break;
              }
            }
            t *= 0.5;
          }
          if (!accepted) break;
        }
      }
    }
  }

  // Polish: smallest Euclidean ball of the log images in an orthonormal frame.
  double step = std::numeric_limits<double>::infinity();
  double r = max_distance(pts, m, c);
  for (int it = 0; it < opts.polish_iterations && r > 0.0; ++it) {
    const Eigen::LLT<Mat2> llt(m.metric(c));
    const Mat2 lt = llt.matrixU();
    std::vector<Point> u(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) u[i] = lt * m.log_map(c, pts[i]);
    const EnclosingBall tangent = welzl(u, opts.seed);
    const Vec2 delta = lt.triangularView<Eigen::Upper>().solve(Vec2(tangent.center2()));
    step = delta.norm() * std::sqrt(m.metric(c).norm());
    Point next = c + delta;
    // Keep the step only if it does not increase the exact radius.
    const double rn = m.in_chart(next) ? max_distance(pts, m, next) : std::numeric_limits<double>::infinity();
    if (rn > r * (1 + 1e-14)) {
      next = c + 0.5 * delta;
      const double rh = m.in_chart(next) ? max_distance(pts, m, next) : std::numeric_limits<double>::infinity();
      if (rh > r * (1 + 1e-14)) break;
      c = next;
      r = rh;
    } else {
      c = next;
      r = rn;
    }
    if (step < opts.polish_tol * (1.0 + r)) break;
  }
  if (step > 1e-8 * (1.0 + r) && r > 0.0 && step != std::numeric_limits<double>::infinity())
    throw Error(ErrorCode::NoConvergence, "one-centre polish did not settle");

  EnclosingBall out;
  out.center = c;
  out.radius = r;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (m.distance(c, pts[i]) >= r - kAttainRel * r) out.attainment.push_back(static_cast<int>(i));
  return out;
}

RadiusResult rad(const Region& region, const OneCenterOptions& opts, const std::optional<Point>& warm_start) {
  const ManifoldBackend& m = region.backend();
  RadiusResult out;
  if (m.is_flat())
    out.ball = welzl(region.vertices(), opts.seed);
  else
    out.ball = geodesic_one_center(region.vertices(), m, opts, warm_start);
  if (m.kind() == BackendKind::EmbeddedSurface) {
    std::vector<Point3> cloud;
    cloud.reserve(region.size());
    for (const Point& v : region.vertices()) cloud.push_back(*m.embed(v));
    out.ambient = welzl(cloud, opts.seed);
  }
  return out;
}

}  // namespace isodiam
