#include "isodiam/verify.hpp"

#include "isodiam/meb.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>

namespace isodiam {

std::string_view to_string(Bound b) noexcept {
  switch (b) {
    case Bound::AtLeastOne: return ">=1";
    case Bound::AtMostOne: return "<=1";
    case Bound::EqualOne: return "=1";
  }
  return "?";
}

std::string_view to_string(ScanExpectation e) noexcept {
  switch (e) {
    case ScanExpectation::Decreasing: return "decreasing";
    case ScanExpectation::ApexMinimum: return "apex_minimum";
    case ScanExpectation::Constant: return "constant";
    case ScanExpectation::AboveOnly: return "above_only";
  }
  return "?";
}

void VerificationReport::finalize() {
  switch (bound) {
    case Bound::AtLeastOne: margin = ratio - 1.0; break;
    case Bound::AtMostOne: margin = 1.0 - ratio; break;
    case Bound::EqualOne: margin = -std::abs(ratio - 1.0); break;
  }
  pass = margin >= -tol;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j = {{"id", id},         {"backend", backend}, {"V", V},       {"P", P},
                      {"rad", rad},       {"ratio", ratio},     {"bound", to_string(bound)},
                      {"margin", margin}, {"tol", tol},         {"pass", pass}, {"refinement_delta", refinement_delta}};
  j["strict"] = strict();
  if (expected) {
    j["expected"] = *expected;
    j["comparator"] = comparator;
  }
  if (!details.empty()) j["details"] = details;
  return j;
}

namespace {

struct Measured {
  double V, P, rad, ratio;
};

Measured measure(const Region& r) {
  r.validate();
  const double V = r.volume(), P = r.perimeter(), rd = isodiam::rad(r).ball.radius;
  return {V, P, rd, rd * P / (2.0 * V)};
}

VerificationReport region_report(std::string id, const Region& r, const Region& refined, Bound bound, double tol) {
  const Measured m = measure(r);
  VerificationReport rep;
  rep.id = std::move(id);
  rep.backend = r.backend().descriptor();
  rep.V = m.V;
  rep.P = m.P;
  rep.rad = m.rad;
  rep.ratio = m.ratio;
  rep.bound = bound;
  rep.tol = tol;
  rep.refinement_delta = std::abs(measure(refined).ratio - m.ratio);
  rep.details["vertices"] = r.size();
  rep.finalize();
  return rep;
}

void require_euclidean(const ManifoldBackend& m) {
  if (m.kind() != BackendKind::EuclideanPlane) throw Error(ErrorCode::WrongBackend, "Euclidean backend required");
}

void require_sign(const ManifoldBackend& m, CurvatureSign sign) {
  if (m.curvature_sign() != sign)
    throw Error(ErrorCode::WrongBackend, m.name() + " is declared " + std::string(to_string(m.curvature_sign())) +
                                             ", expected " + std::string(to_string(sign)));
}

void flag_equality(VerificationReport& rep) { rep.details["equality"] = std::abs(rep.ratio - 1.0) <= rep.tol; }

}  // namespace

Region subdivide(const Region& r) {
  std::vector<Point> v;
  v.reserve(2 * r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    v.push_back(r[i]);
    v.push_back(0.5 * (r[i] + r[(i + 1) % r.size()]));
  }
  return Region(r.backend_ptr(), std::move(v));
}

VerificationReport check_euclidean(const Region& region, double tol) {
  require_euclidean(region.backend());
  auto rep = region_report("euclidean", region, subdivide(region), Bound::AtLeastOne, tol);
  flag_equality(rep);
  return rep;
}

VerificationReport check_euclidean(const RegionFamily& family, int n, double tol) {
  const Region r = family(n);
  require_euclidean(r.backend());
  auto rep = region_report("euclidean", r, family(2 * n), Bound::AtLeastOne, tol);
  flag_equality(rep);
  return rep;
}

VerificationReport check_ch(const Region& region, double tol) {
  require_sign(region.backend(), CurvatureSign::NonPositive);
  return region_report("cartan_hadamard", region, subdivide(region), Bound::AtLeastOne, tol);
}

VerificationReport check_ch(const RegionFamily& family, int n, double tol) {
  const Region r = family(n);
  require_sign(r.backend(), CurvatureSign::NonPositive);
  return region_report("cartan_hadamard", r, family(2 * n), Bound::AtLeastOne, tol);
}

namespace {

VerificationReport ball_report(std::string id, const BackendPtr& m, const Point& center, double r, Bound bound,
                               double tol) {
  const BallMeasures b = m->ball_measures(center, r, {512, 256});
  const BallMeasures fine = m->ball_measures(center, r, {1024, 512});
  VerificationReport rep;
  rep.id = std::move(id);
  rep.backend = m->descriptor();
  rep.V = b.volume;
  rep.P = b.perimeter;
  rep.rad = r;
  rep.ratio = 1.0 + b.excess;
  rep.bound = bound;
  rep.tol = tol;
  rep.refinement_delta = std::abs(fine.excess - b.excess);
  rep.details["center"] = {center.x(), center.y()};
  rep.details["excess"] = b.excess;
  rep.finalize();
  return rep;
}

}  // namespace

VerificationReport check_ch_ball(const BackendPtr& m, const Point& center, double r, double tol) {
  require_sign(*m, CurvatureSign::NonPositive);
  return ball_report("cartan_hadamard_ball", m, center, r, Bound::AtLeastOne, tol);
}

VerificationReport check_ricci_ball(const BackendPtr& m, const Point& center, double r, double tol) {
  require_sign(*m, CurvatureSign::NonNegative);
  auto rep = ball_report("ricci_ball", m, center, r, Bound::AtMostOne, tol);
  flag_equality(rep);
  return rep;
}

Region random_star_region(const BackendPtr& m, const Point& center, int n, double r_min, double r_max,
                          std::uint64_t seed) {
  if (n < 4 || !(0.0 < r_min && r_min <= r_max)) throw Error(ErrorCode::InvalidArgument, "bad star region parameters");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 0.9), radius(r_min, r_max);
  // One angle per sector keeps consecutive gaps below pi.
  std::vector<double> th(n);
  for (int i = 0; i < n; ++i) th[i] = 2.0 * M_PI * (i + jitter(rng)) / n;
  const Mat2 lt = Eigen::LLT<Mat2>(m->metric(center)).matrixU();
  std::vector<Point> v(n);
  for (int i = 0; i < n; ++i) {
    const Vec2 u = lt.triangularView<Eigen::Upper>().solve(Vec2(std::cos(th[i]), std::sin(th[i])));
    v[i] = m->exp_map(center, radius(rng) * u);
  }
  return Region(m, std::move(v));
}

// ---------------------------------------------------------------------------
// Infimum scans

ScanExpectation default_expectation(const ManifoldBackend& m) {
  if (m.is_flat()) return ScanExpectation::Constant;
  if (m.name() == "helicoid") return ScanExpectation::Decreasing;
  if (const auto* w = dynamic_cast<const WarpedSurface*>(&m)) {
    if (m.curvature_sign() == CurvatureSign::NonNegative) return ScanExpectation::ApexMinimum;
    // Monotone phi' is only known for the tanh family.
    if (m.curvature_sign() == CurvatureSign::NonPositive && dynamic_cast<const TanhProfile*>(&w->profile()))
      return ScanExpectation::Decreasing;
  }
  return ScanExpectation::AboveOnly;
}

namespace {

double radius_for_volume(const ManifoldBackend& m, const Point& c, double V, const FanOptions& fan) {
  auto f = [&](double r) { return m.ball_measures(c, r, fan).volume - V; };
  double lo = 0.0, hi = std::sqrt(V / M_PI);
  int expansions = 0;
  try {
    while (f(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++expansions > 40) throw Error(ErrorCode::RootFindFailed, "volume not bracketed");
    }
    double flo = lo > 0.0 ? f(lo) : -V;
    std::uintmax_t it = 100;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, flo, f(hi), [](double x, double y) { return std::abs(x - y) <= 1e-14 * std::max(std::abs(x), 1.0); },
        it);
    return 0.5 * (a + b);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RootFindFailed) throw;
    throw Error(ErrorCode::RootFindFailed, std::string("ball volume equation: ") + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::RootFindFailed, std::string("ball volume equation: ") + e.what());
  }
}

}  // namespace

nlohmann::json ScanReport::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows)
    rs.push_back({{"d", r.d}, {"center", {r.center.x(), r.center.y()}}, {"r", r.r}, {"P", r.P}, {"f", r.f},
                  {"excess", r.excess}});
  return {{"backend", backend},
          {"V", V},
          {"expectation", to_string(expectation)},
          {"rows", rs},
          {"strictly_decreasing", strictly_decreasing},
          {"all_above", all_above},
          {"apex_beats_far", apex_beats_far},
          {"max_abs_excess", max_abs_excess},
          {"final_gap", final_gap},
          {"pass", pass}};
}

ScanReport infimum_scan(const BackendPtr& m, double V, const std::vector<Point>& centers, const ScanOptions& opts) {
  if (!(V > 0.0) || centers.empty()) throw Error(ErrorCode::InvalidArgument, "scan needs V > 0 and centres");
  ScanReport rep;
  rep.backend = m->descriptor();
  rep.V = V;
  rep.expectation = opts.expectation.value_or(default_expectation(*m));
  for (const Point& c : centers) {
    ScanRow row;
    row.center = c;
    row.d = (c - m->apex()).norm();
    if (m->name() == "helicoid" && row.d > kHelicoidScanCap)
      throw Error(ErrorCode::InvalidArgument, "helicoid scan is capped at d = 12");
    row.r = radius_for_volume(*m, c, V, opts.fan);
    const BallMeasures b = m->ball_measures(c, row.r, opts.fan);
    row.P = b.perimeter;
    row.excess = b.excess;
    row.f = 2.0 * V * (1.0 + b.excess);
    rep.rows.push_back(row);
  }
  rep.strictly_decreasing = rep.all_above = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const double e = rep.rows[i].excess;
    rep.all_above = rep.all_above && e > 0.0;
    rep.max_abs_excess = std::max(rep.max_abs_excess, std::abs(e));
    if (i > 0) rep.strictly_decreasing = rep.strictly_decreasing && e < rep.rows[i - 1].excess;
  }
  rep.final_gap = rep.rows.back().excess;
  rep.apex_beats_far = rep.rows.size() > 1 && rep.rows.front().d == 0.0;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    rep.apex_beats_far = rep.apex_beats_far && rep.rows.front().excess < rep.rows[i].excess;
  switch (rep.expectation) {
    case ScanExpectation::Decreasing: rep.pass = rep.strictly_decreasing && rep.all_above; break;
    case ScanExpectation::ApexMinimum: rep.pass = rep.apex_beats_far; break;
    case ScanExpectation::Constant: rep.pass = rep.max_abs_excess <= opts.constant_tol; break;
    case ScanExpectation::AboveOnly: rep.pass = rep.all_above; break;
  }
  return rep;
}

void write_scan_csv(const ScanReport& rep, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << std::setprecision(17) << "d,f\n";
  for (const auto& r : rep.rows) out << r.d << ',' << r.f << '\n';
}

// ---------------------------------------------------------------------------
// Constrained perimeter minimisation

Lens lens_measures(double R, double c, double rho) {
  Lens L{c, rho, 0.0, 0.0};
  if (c + rho <= R) {
    L.area = M_PI * rho * rho;
    L.perimeter = 2.0 * M_PI * rho;
  } else if (c + R <= rho) {
    L.area = M_PI * R * R;
    L.perimeter = 2.0 * M_PI * R;
  } else if (c < R + rho) {
    // Half-angles at the two centres subtended by the intersection points.
    const double aR = std::acos(std::clamp((c * c + R * R - rho * rho) / (2.0 * c * R), -1.0, 1.0));
    const double aS = std::acos(std::clamp((c * c + rho * rho - R * R) / (2.0 * c * rho), -1.0, 1.0));
    L.area = R * R * (aR - 0.5 * std::sin(2.0 * aR)) + rho * rho * (aS - 0.5 * std::sin(2.0 * aS));
    L.perimeter = 2.0 * aR * R + 2.0 * aS * rho;
  }
  return L;
}

Lens best_lens(double R, double V, int samples) {
  if (!(V > 0.0 && V <= M_PI * R * R * (1 + 1e-12))) throw Error(ErrorCode::InvalidArgument, "V must lie in (0, vol(B)]");
  // For each rho the area falls monotonically as the centre moves out; solve for c.
  auto at = [&](double rho) {
    const double hi = R + rho;
    auto g = [&](double c) { return lens_measures(R, c, rho).area - V; };
    if (g(0.0) < 0.0) return Lens{0.0, rho, 0.0, std::numeric_limits<double>::infinity()};
    const auto [a, b] =
        boost::math::tools::bisect(g, 0.0, hi, [](double x, double y) { return std::abs(x - y) < 1e-14; });
    return lens_measures(R, 0.5 * (a + b), rho);
  };
  const double rho_min = std::sqrt(V / M_PI), rho_max = 20.0 * R;
  Lens best = at(rho_min);
  double best_rho = rho_min;
  for (int i = 1; i <= samples; ++i) {
    const double rho = rho_min * std::pow(rho_max / rho_min, double(i) / samples);
    const Lens L = at(rho);
    if (L.perimeter < best.perimeter) {
      best = L;
      best_rho = rho;
    }
  }
  const double step = std::pow(rho_max / rho_min, 1.0 / samples);
  const auto [rho, P] = boost::math::tools::brent_find_minima(
      [&](double r) { return at(r).perimeter; }, std::max(rho_min, best_rho / step), std::min(rho_max, best_rho * step),
      50);
  return P < best.perimeter ? at(rho) : best;
}

namespace {

struct ContactStats {
  int vertices = 0;
  double fraction = 0.0, mean = 0.0, stddev = 0.0;
};

ContactStats contact_stats(const Region& r, const Container& B, double tol) {
  ContactStats s;
  const std::size_t n = r.size();
  std::vector<char> on(n);
  for (std::size_t i = 0; i < n; ++i) {
    on[i] = (r[i] - B.center).norm() >= B.radius - tol;
    s.vertices += on[i];
  }
  const auto edges = r.edge_lengths();
  double contact_len = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (on[i] && on[(i + 1) % n]) contact_len += edges[i];
  s.fraction = contact_len / r.perimeter();
  const auto k = r.curvature();
  std::vector<double> free;
  for (std::size_t i = 0; i < n; ++i)
    if (!on[i] && !on[(i + 1) % n] && !on[(i + n - 1) % n]) free.push_back(k[i]);
  if (!free.empty()) {
    s.mean = std::accumulate(free.begin(), free.end(), 0.0) / free.size();
    double var = 0.0;
    for (double x : free) var += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(var / free.size());
  }
  return s;
}

// Boundary of the optimum near the point closest to the container, as a graph
// over the tangent line of the container there (z pointing inward).
std::optional<ObstacleSolution> hand_off(const Region& r, const Container& B, double H0, const ConstrainedOptions& o,
                                         double r0) {
  const std::size_t n = r.size();
  std::size_t far = 0;
  for (std::size_t i = 1; i < n; ++i)
    if ((r[i] - B.center).norm() > (r[far] - B.center).norm()) far = i;
  const Vec2 down = (r[far] - B.center).normalized();
  const Vec2 ex = rot_ccw(down);  // counterclockwise tangent: x grows along the boundary
  const Point origin = B.center + B.radius * down;
  auto local = [&](const Point& p) { return Vec2((p - origin).dot(ex), -(p - origin).dot(down)); };
  const double reach = r0 + 4.0 * r0 / o.obstacle_cells;
  std::vector<double> xs, zs;
  // Walk backwards then forwards from the farthest vertex until |x| leaves the reach.
  std::vector<Vec2> chain{local(r[far])};
  for (std::size_t k = 1; k < n && chain.front().x() >= -reach; ++k) {
    const Vec2 q = local(r[(far + n - k) % n]);
    if (q.x() >= chain.front().x()) break;
    chain.insert(chain.begin(), q);
  }
  for (std::size_t k = 1; k < n && chain.back().x() <= reach; ++k) {
    const Vec2 q = local(r[(far + k) % n]);
    if (q.x() <= chain.back().x()) break;
    chain.push_back(q);
  }
  if (chain.front().x() > -reach || chain.back().x() < reach) return std::nullopt;
  for (const auto& q : chain) {
    xs.push_back(q.x());
    zs.push_back(q.y());
  }
  ObstacleProblem p;
  p.chart = GraphChart::euclidean(1, r0);
  p.cells = o.obstacle_cells;
  p.obstacle = Field::cap(B.radius);
  p.dirichlet = Field::from_json({{"kind", "samples"}, {"x", xs}, {"values", zs}});
  p.H0 = H0;
  return solve_vi(p);
}

}  // namespace

ConstrainedReport constrained_run(const BackendPtr& m, double V, const Container& B, const ConstrainedOptions& o) {
  require_euclidean(*m);
  const double full = M_PI * B.radius * B.radius;
  if (!(V > 0.0) || V > full * (1 + 1e-12)) throw Error(ErrorCode::InvalidArgument, "V must lie in (0, vol(B)]");
  ConstrainedReport out{VerificationReport{}, MinimizeResult{make_state(regular_polygon(m, B.center, B.radius, o.vertices), full), {}},
                        best_lens(B.radius, V), 0.0, 0, 0.0, 0.0, std::nullopt};
  auto& rep = out.report;
  rep.id = "constrained";
  rep.backend = m->descriptor();
  rep.bound = Bound::EqualOne;
  rep.tol = o.perimeter_tol;
  rep.expected = out.oracle.perimeter;
  rep.comparator = "least perimeter over circle-container lenses";

  ShapeParams params = o.shape;
  params.container = B;
  auto run_at = [&](int n) {
    const double rv = std::sqrt(V / M_PI);
    const double s = rv < 0.98 * B.radius ? std::min(1.3, 0.98 * B.radius / rv) : 1.0;
    return minimize(V, chart_ellipse(m, B.center, rv * s, rv / s, n), params);
  };
  if (V >= full * (1 - 1e-12)) {
    // The container itself: every vertex on the circle, nothing to optimise.
    out.run.trace.clear();
    out.run.termination = Termination::Converged;
  } else {
    out.run = run_at(o.vertices);
  }
  const Region& E = out.run.state.region;
  const ContactStats cs = contact_stats(E, B, o.contact_tol);
  out.contact_vertices = cs.vertices;
  out.contact_fraction = cs.fraction;
  out.interior_curvature_mean = cs.mean;
  out.interior_curvature_std = cs.stddev;

  rep.V = E.volume();
  rep.P = E.perimeter();
  rep.rad = B.radius;
  rep.ratio = rep.P / out.oracle.perimeter;
  if (V < full * (1 - 1e-12)) {
    const Region fine = run_at(2 * o.vertices).state.region;
    rep.refinement_delta = std::abs(fine.perimeter() / out.oracle.perimeter - rep.ratio);
  }
  rep.finalize();
  const bool curvature_ok = cs.stddev <= o.curvature_tol;
  rep.pass = rep.pass && curvature_ok;
  rep.details = {{"oracle_rho", out.oracle.rho},
                 {"oracle_offset", out.oracle.c},
                 {"contact_fraction", cs.fraction},
                 {"contact_vertices", cs.vertices},
                 {"interior_curvature_mean", cs.mean},
                 {"interior_curvature_std", cs.stddev},
                 {"curvature_tol", o.curvature_tol},
                 {"termination", to_string(out.run.termination)},
                 {"iterations", out.run.trace.empty() ? 0 : out.run.trace.back().iteration}};

  if (cs.mean > 0.0 && cs.fraction < 1.0) {
    const double r0 = std::min(o.obstacle_radius, 0.5 / cs.mean);
    out.obstacle = hand_off(E, B, -cs.mean, o, r0);
    if (out.obstacle) {
      const auto& sol = *out.obstacle;
      rep.details["obstacle"] = {{"contact_nodes", sol.contact_count()},
                                 {"complementarity_residual", sol.complementarity_residual},
                                 {"picard_iterations", sol.picard_iterations},
                                 {"max_gradient", sol.max_gradient},
                                 {"chart_radius", r0}};
    }
  }
  return out;
}

}  // namespace isodiam
