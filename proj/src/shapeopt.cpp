#include "isodiam/shapeopt.hpp"

#include <Eigen/Sparse>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>

namespace isodiam {

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::Budget: return "budget";
    case Termination::LineSearchFailed: return "line_search_failed";
  }
  return "?";
}

namespace {

EnclosingBall ball_of(const Region& r, const ShapeParams& p, const std::optional<Point>& warm) {
  if (p.container) {
    EnclosingBall b;
    b.center = p.container->center;
    b.radius = p.container->radius;
    const auto& v = r.vertices();
    for (std::size_t i = 0; i < v.size(); ++i)
      if ((v[i] - p.container->center).norm() >= b.radius * (1 - kAttainRel)) b.attainment.push_back(int(i));
    return b;
  }
  return rad(r, p.meb, warm).ball;
}

double volume_radius(double V) { return std::sqrt(std::abs(V) / M_PI); }

// Outward metric-unit normals.
std::vector<Vec2> outward_normals(const Region& r) {
  auto n = r.inward_normals();
  for (auto& v : n) v = -v;
  return n;
}

}  // namespace

ShapeState make_state(Region region, double target_volume, const ShapeParams& params) {
  ShapeState s{std::move(region), {}, 0.0, target_volume, 0.0, {}};
  evaluate(s, params);
  return s;
}

double evaluate(ShapeState& s, const ShapeParams& params) {
  std::optional<Point> warm;
  if (s.ball.center.size() == 2) warm = s.ball.center2();
  s.ball = ball_of(s.region, params, warm);
  s.functional_value = s.ball.radius * s.region.perimeter();
  return s.functional_value;
}

std::vector<Vec2> perimeter_gradient(const ShapeState& s) { return s.region.perimeter_gradient(); }

std::vector<Vec2> volume_gradient(const ShapeState& s) { return s.region.volume_gradient(); }

std::vector<Vec2> radius_subgradient(const ShapeState& s, bool include_previous) {
  std::set<int> active(s.ball.attainment.begin(), s.ball.attainment.end());
  if (include_previous) active.insert(s.previous_attainment.begin(), s.previous_attainment.end());
  if (active.empty()) throw Error(ErrorCode::EmptyAttainment, "attainment set is empty");
  const ManifoldBackend& m = s.region.backend();
  const Point c = s.ball.center2();
  std::vector<Vec2> g(s.region.size(), Vec2::Zero());
  const double w = 1.0 / static_cast<double>(active.size());
  for (int i : active) {
    const Point& v = s.region[i];
    const Vec2 toward = m.log_map(v, c);
    const double d = m.norm(v, toward);
    if (d == 0.0) continue;
    g[i] = -w * (m.metric(v) * toward) / d;
  }
  return g;
}

double estimate_H0(const Region& r, const std::vector<int>& subset) {
  const auto gp = r.perimeter_gradient();
  const auto gv = r.volume_gradient();
  const ManifoldBackend& m = r.backend();
  double num = 0.0, den = 0.0;
  auto add = [&](std::size_t i) {
    const Vec2 w = m.metric(r[i]).ldlt().solve(gv[i]);
    num += gp[i].dot(w);
    den += gv[i].dot(w);
  };
  if (subset.empty())
    for (std::size_t i = 0; i < r.size(); ++i) add(i);
  else
    for (int i : subset) add(static_cast<std::size_t>(i));
  return den > 0.0 ? num / den : 0.0;
}

ProjectionReport project_volume(ShapeState& s, const ShapeParams& params) {
  ProjectionReport rep;
  const std::size_t n = s.region.size();
  const double V0 = s.region.volume();
  rep.deficit = s.target_volume - V0;
  const double tol = params.vol_tol * std::abs(s.target_volume);
  if (std::abs(rep.deficit) <= tol) return rep;
  if (std::abs(rep.deficit) > 0.1 * std::abs(s.target_volume))
    throw Error(ErrorCode::InvalidArgument, "volume deficit exceeds 10% of the target");

  double kmax = 0.0;
  for (double k : s.region.curvature()) kmax = std::max(kmax, std::abs(k));
  rep.C1 = (kmax + 1.0) * params.patch_factor;

  // Patch: arc of n/4 vertices centred as far (cyclically) from the attainment set as possible.
  const std::size_t len = std::max<std::size_t>(1, static_cast<std::size_t>(params.patch_fraction * n));
  std::vector<char> attained(n, 0);
  for (int i : s.ball.attainment) attained[static_cast<std::size_t>(i)] = 1;
  std::vector<char> mask(n, 0);
  std::size_t best_start = n;
  std::size_t best_gap = 0;
  for (std::size_t start = 0; start < n; ++start) {
    bool clear = true;
    for (std::size_t k = 0; k < len && clear; ++k) clear = !attained[(start + k) % n];
    if (!clear) continue;
    std::size_t gap = n;
    for (std::size_t k = 0; k < n; ++k)
      if (attained[k]) {
        const std::size_t mid = (start + len / 2) % n;
        const std::size_t d = std::min((k + n - mid) % n, (mid + n - k) % n);
        gap = std::min(gap, d);
      }
    if (best_start == n || gap > best_gap) {
      best_start = start;
      best_gap = gap;
    }
  }
  if (best_start == n) {
    rep.used_patch = false;
    std::fill(mask.begin(), mask.end(), 1);
  } else {
    for (std::size_t k = 0; k < len; ++k) mask[(best_start + k) % n] = 1;
  }

  const double P0 = s.region.perimeter();
  const std::vector<Point> base = s.region.vertices();
  const bool scale_fallback = !rep.used_patch && s.region.backend().kind() == BackendKind::EuclideanPlane;
  Point centroid = Point::Zero();
  for (const Point& p : base) centroid += p;
  centroid /= static_cast<double>(n);

  std::vector<Vec2> dir(n, Vec2::Zero());
  if (scale_fallback) {
    for (std::size_t i = 0; i < n; ++i) dir[i] = base[i] - centroid;
  } else {
    const auto normals = outward_normals(s.region);
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) dir[i] = normals[i];
  }

  double t = 0.0;
  double V = V0;
  std::vector<Point> v = base;
  for (int it = 0; it < 50; ++it) {
    const auto gv = s.region.volume_gradient();
    double dvdt = 0.0;
    for (std::size_t i = 0; i < n; ++i) dvdt += gv[i].dot(dir[i]);
    if (dvdt == 0.0) throw Error(ErrorCode::NoConvergence, "volume projection has zero derivative");
    t += (s.target_volume - V) / dvdt;
    for (std::size_t i = 0; i < n; ++i) v[i] = base[i] + t * dir[i];
    s.region.set_vertices(v);
    V = s.region.volume();
    rep.newton_iterations = it + 1;
    if (std::abs(V - s.target_volume) <= tol) break;
  }
  if (std::abs(V - s.target_volume) > tol) throw Error(ErrorCode::NoConvergence, "volume projection did not converge");
  rep.perimeter_change = s.region.perimeter() - P0;
  rep.bound_holds = rep.perimeter_change <= rep.C1 * std::abs(rep.deficit) + 1e-12 * P0;
  return rep;
}

// ---------------------------------------------------------------------------

Region redistribute(const Region& r, int n) {
  const auto e = r.edge_lengths();
  const std::size_t m = r.size();
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + e[i];
  const double total = cum[m];
  std::vector<Point> out(n);
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double target = total * k / n;
    while (seg + 1 < m && cum[seg + 1] <= target) ++seg;
    const double f = e[seg] > 0.0 ? (target - cum[seg]) / e[seg] : 0.0;
    out[k] = r[seg] + f * (r[(seg + 1) % m] - r[seg]);
  }
  return Region(r.backend_ptr(), std::move(out));
}

namespace {

// H1 smoothing along the curve: (dual - sigma D) w = dual u, D the arclength Laplacian.
std::vector<Vec2> sobolev_smooth(const Region& r, const std::vector<Vec2>& u, double sigma) {
  const int n = static_cast<int>(r.size());
  const auto e = r.edge_lengths();
  const auto dual = r.dual_lengths();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * n);
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n, im = (i + n - 1) % n;
    const double a = sigma / e[i], b = sigma / e[im];
    trip.emplace_back(i, i, dual[i] + a + b);
    trip.emplace_back(i, ip, -a);
    trip.emplace_back(i, im, -b);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  Eigen::MatrixXd rhs(n, 2);
  for (int i = 0; i < n; ++i) rhs.row(i) = dual[i] * u[i].transpose();
  const Eigen::MatrixXd w = solver.solve(rhs);
  std::vector<Vec2> out(n);
  for (int i = 0; i < n; ++i) out[i] = w.row(i).transpose();
  return out;
}

// Covector field -> L2 vector field (metric raise, divide by the vertex dual length).
std::vector<Vec2> raise(const Region& r, const std::vector<Vec2>& g) {
  const auto dual = r.dual_lengths();
  std::vector<Vec2> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = r.backend().metric(r[i]).ldlt().solve(g[i]) / dual[i];
  return out;
}

double pair(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].dot(b[i]);
  return s;
}

void clamp_to_container(std::vector<Point>& v, const Container& c) {
  for (auto& p : v) {
    const Vec2 d = p - c.center;
    const double len = d.norm();
    if (len > c.radius) p = c.center + d * (c.radius / len);
  }
}

std::vector<int> contact_set(const ShapeState& s, double tol) {
  std::vector<int> out;
  const ManifoldBackend& m = s.region.backend();
  for (std::size_t i = 0; i < s.region.size(); ++i)
    if (m.distance(s.ball.center2(), s.region[i]) >= s.ball.radius - tol) out.push_back(static_cast<int>(i));
  return out;
}

// Chart scaling about the vertex centroid until the volume is within 1% of V.
Region rescale_to_volume(const Region& r, double V) {
  Point c = Point::Zero();
  for (const Point& p : r.vertices()) c += p;
  c /= static_cast<double>(r.size());
  auto scaled = [&](double s) {
    std::vector<Point> v = r.vertices();
    for (auto& p : v) p = c + s * (p - c);
    return v;
  };
  auto fits = [&](double s) {
    for (const Point& p : scaled(s))
      if (!r.backend().in_chart(p)) return false;
    return true;
  };
  auto f = [&](double s) { return Region(r.backend_ptr(), scaled(s)).volume() - V; };
  double lo = 1.0, hi = 1.0;
  if (f(1.0) > 0.0) {
    while (f(lo) > 0.0) lo *= 0.5;
  } else {
    while (f(hi) < 0.0) {
      if (!fits(hi * 1.5)) throw Error(ErrorCode::OutOfChart, "target volume does not fit in the chart");
      hi *= 1.5;
    }
  }
  boost::uintmax_t iters = 100;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, [&](double x, double y) { return std::abs(f(0.5 * (x + y))) < 1e-3 * V; }, iters);
  return Region(r.backend_ptr(), scaled(0.5 * (a + b)));
}

}  // namespace

MinimizeResult minimize(double V, Region init, const ShapeParams& params) {
  if (std::abs(init.volume() - V) > 0.1 * std::abs(V)) init = rescale_to_volume(init, V);
  MinimizeResult res{make_state(std::move(init), V, params), {}, Termination::Budget, true, 0.0, true};
  ShapeState& s = res.state;
  auto note_projection = [&](const ProjectionReport& p) {
    res.max_projection_C1 = std::max(res.max_projection_C1, p.C1);
    res.projection_bound_holds = res.projection_bound_holds && p.bound_holds;
  };
  if (std::abs(s.region.volume() - V) > params.vol_tol * std::abs(V)) {
    note_projection(project_volume(s, params));
    evaluate(s, params);
  }
  const double R = volume_radius(V);
  const double sigma = std::pow(params.sobolev_length * R, 2);
  double step = -1.0;
  int consecutive_rejections = 0;
  std::vector<double> history{s.functional_value};

  auto record = [&](int it, double t, int rejected) {
    s.multiplier_H0 = estimate_H0(s.region);
    res.trace.push_back({it, s.functional_value, s.ratio(), s.ball.radius, s.region.perimeter(), s.region.volume(),
                         s.multiplier_H0, t, rejected});
  };
  record(0, 0.0, 0);

  for (int it = 1; it <= params.max_iterations; ++it) {
    const Region& r = s.region;
    const double P = r.perimeter();
    const auto gP = perimeter_gradient(s);
    const auto gV = volume_gradient(s);
    std::vector<Vec2> G(r.size());
    if (params.container) {
      G = gP;
    } else {
      const auto gR = radius_subgradient(s, true);
      for (std::size_t i = 0; i < G.size(); ++i) G[i] = s.ball.radius * gP[i] + P * gR[i];
    }
    const auto w = sobolev_smooth(r, raise(r, G), sigma);
    const auto wV = sobolev_smooth(r, raise(r, gV), sigma);
    const double alpha = pair(G, wV) / pair(gV, wV);
    std::vector<Vec2> d(r.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = -(w[i] - alpha * wV[i]);
    const double slope = pair(G, d);
    double dmax = 0.0;
    for (const auto& x : d) dmax = std::max(dmax, x.norm());
    if (dmax == 0.0 || slope >= 0.0) {
      res.termination = Termination::Converged;
      break;
    }
    if (step < 0.0) step = params.max_displacement * R / dmax;
    double t = std::min(2.0 * step, params.max_displacement * R / dmax);

    const double f0 = s.functional_value;
    int rejected = 0;
    bool accepted = false;
    while (t * dmax > params.min_step * R) {
      std::vector<Point> v = r.vertices();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += t * d[i];
      if (params.container) clamp_to_container(v, *params.container);
      bool ok = true;
      for (const auto& p : v) ok = ok && r.backend().in_chart(p);
      if (ok) {
        ShapeState trial{Region(r.backend_ptr(), v), s.ball, s.multiplier_H0, V, 0.0, s.ball.attainment};
        if (trial.region.is_simple()) {
          consecutive_rejections = 0;
          try {
            trial.ball = ball_of(trial.region, params, s.ball.center2());
            const auto pr = project_volume(trial, params);
            if (params.container) {
              std::vector<Point> cv = trial.region.vertices();
              clamp_to_container(cv, *params.container);
              trial.region.set_vertices(cv);
            }
            evaluate(trial, params);
            if (trial.functional_value <= f0 + 1e-4 * t * slope && trial.region.is_simple() &&
                std::abs(trial.region.volume() - V) <= params.vol_tol * std::abs(V)) {
              note_projection(pr);
              trial.previous_attainment = s.ball.attainment;
              s = std::move(trial);
              accepted = true;
              break;
            }
          } catch (const Error& e) {
            if (e.code() != ErrorCode::NoConvergence && e.code() != ErrorCode::InvalidArgument) throw;
          }
        } else {
          ++rejected;
          if (++consecutive_rejections > params.max_rejections)
            throw Error(ErrorCode::SelfIntersection, "too many consecutive self-intersecting trial steps");
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.termination = Termination::LineSearchFailed;
      break;
    }
    step = t;

    if (params.redistribute_every > 0 && it % params.redistribute_every == 0) {
      ShapeState alt{redistribute(s.region, static_cast<int>(s.region.size())), s.ball, s.multiplier_H0, V, 0.0,
                     s.previous_attainment};
      try {
        if (alt.region.is_simple()) {
          alt.ball = ball_of(alt.region, params, s.ball.center2());
          project_volume(alt, params);
          evaluate(alt, params);
          if (alt.functional_value <= s.functional_value && alt.region.is_simple()) s = std::move(alt);
        }
      } catch (const Error&) {
      }
    }

    if (s.functional_value > history.back() * (1 + 1e-12)) res.monotone = false;
    history.push_back(s.functional_value);
    record(it, t, rejected);

    if (history.size() > static_cast<std::size_t>(params.stall_window)) {
      const double old = history[history.size() - 1 - params.stall_window];
      if ((old - s.functional_value) <= params.stall_rel * std::abs(old)) {
        res.termination = Termination::Converged;
        break;
      }
    }
  }
  s.multiplier_H0 = estimate_H0(s.region);
  return res;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << std::setprecision(17) << "iteration,functional,ratio,rad,P,V,H0_estimate,step,rejected_steps\n";
  for (const auto& r : trace)
    out << r.iteration << ',' << r.functional << ',' << r.ratio << ',' << r.rad << ',' << r.P << ',' << r.V << ','
        << r.H0 << ',' << r.step << ',' << r.rejected_steps << '\n';
}

CurvatureBoundReport curvature_bound_check(const ShapeState& s, double ball_curvature, double epsilon,
                                           double contact_tol) {
  CurvatureBoundReport rep;
  rep.eta = ball_curvature;
  rep.epsilon = epsilon;
  const auto contact = contact_set(s, contact_tol);
  rep.contact_vertices = static_cast<int>(contact.size());
  std::vector<char> is_contact(s.region.size(), 0);
  for (int i : contact) is_contact[static_cast<std::size_t>(i)] = 1;
  std::vector<int> off;
  for (std::size_t i = 0; i < s.region.size(); ++i)
    if (!is_contact[i]) off.push_back(static_cast<int>(i));
  const auto k = s.region.curvature();
  if (off.size() >= 3) {
    double mean = 0.0;
    for (int i : off) mean += k[i];
    rep.H0 = mean / off.size();
  } else {
    rep.H0 = estimate_H0(s.region);
  }
  double var = 0.0;
  for (int i : off) var += (k[i] - rep.H0) * (k[i] - rep.H0);
  rep.off_contact_variance = off.empty() ? 0.0 : var / off.size();
  for (int i : contact) {
    rep.max_violation = std::max(rep.max_violation, (rep.eta - epsilon) - k[i]);
    rep.max_violation = std::max(rep.max_violation, k[i] - (rep.H0 + epsilon));
  }
  for (int i : off) rep.max_violation = std::max(rep.max_violation, std::abs(k[i] - rep.H0) - epsilon);
  rep.pass = rep.max_violation <= 0.0;
  return rep;
}

}  // namespace isodiam
