#include "isodiam/region.hpp"

#include "isodiam/meb.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace isodiam {

using boost::math::quadrature::gauss;

Region::Region(BackendPtr backend, std::vector<Point> vertices) : backend_(std::move(backend)) {
  if (!backend_) throw Error(ErrorCode::InvalidArgument, "region needs a backend");
  set_vertices(std::move(vertices));
}

void Region::set_vertices(std::vector<Point> vertices) {
  if (vertices.size() < 3) throw Error(ErrorCode::DegeneratePolygon, "a region needs at least 3 vertices");
  for (const Point& v : vertices)
    if (!backend_->in_chart(v)) throw Error(ErrorCode::OutOfChart, "region vertex outside the chart");
  vertices_ = std::move(vertices);
  cache_ = {};
}

double Region::signed_chart_area() const {
  double s = 0.0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) s += cross2(vertices_[i], vertices_[(i + 1) % n]);
  return 0.5 * s;
}

double Region::volume() const {
  if (!cache_.volume) {
    double s = 0.0;
    const std::size_t n = size();
    if (backend_->is_flat()) {
      s = signed_chart_area();
    } else {
      for (std::size_t i = 0; i < n; ++i) s += backend_->fan_triangle_area(vertices_[i], vertices_[(i + 1) % n]);
    }
    cache_.volume = s;
  }
  return *cache_.volume;
}

std::vector<double> Region::edge_lengths() const {
  if (!cache_.edges) {
    const std::size_t n = size();
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = backend_->edge_length(vertices_[i], vertices_[(i + 1) % n]);
    cache_.edges = std::move(e);
  }
  return *cache_.edges;
}

double Region::perimeter() const {
  if (!cache_.perimeter) {
    double s = 0.0;
    for (double e : edge_lengths()) s += e;
    cache_.perimeter = s;
  }
  return *cache_.perimeter;
}

std::vector<double> Region::dual_lengths() const {
  const auto e = edge_lengths();
  const std::size_t n = size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = 0.5 * (e[(i + n - 1) % n] + e[i]);
  return d;
}

std::vector<Vec2> Region::volume_gradient() const {
  const std::size_t n = size();
  std::vector<Vec2> grad(n, Vec2::Zero());
  const bool flat = backend_->is_flat();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices_[i];
    const Point& b = vertices_[(i + 1) % n];
    const Vec2 normal = rot_cw(b - a);
    double wa = 0.5, wb = 0.5;
    if (!flat) {
      wa = gauss<double, 10>::integrate([&](double s) { return backend_->area_density(a + s * (b - a)) * (1 - s); }, 0.0, 1.0);
      wb = gauss<double, 10>::integrate([&](double s) { return backend_->area_density(a + s * (b - a)) * s; }, 0.0, 1.0);
    }
    grad[i] += wa * normal;
    grad[(i + 1) % n] += wb * normal;
  }
  return grad;
}

std::vector<Vec2> Region::perimeter_gradient() const {
  const std::size_t n = size();
  std::vector<Vec2> grad(n, Vec2::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    const auto [ga, gb] = backend_->edge_length_gradient(vertices_[i], vertices_[(i + 1) % n]);
    grad[i] += ga;
    grad[(i + 1) % n] += gb;
  }
  return grad;
}

std::vector<Vec2> Region::inward_normals() const {
  const std::size_t n = size();
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 tangent = vertices_[(i + 1) % n] - vertices_[(i + n - 1) % n];
    const Mat2 g = backend_->metric(vertices_[i]);
    const Vec2 v = g.ldlt().solve(rot_ccw(tangent));
    out[i] = v / std::sqrt(v.dot(g * v));
  }
  return out;
}

std::vector<double> Region::curvature() const {
  const std::size_t n = size();
  const auto dual = dual_lengths();
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& v = vertices_[i];
    const Eigen::LLT<Mat2> llt(backend_->metric(v));
    const Mat2 lt = llt.matrixU();
    const Vec2 in = lt * (-backend_->log_map_short(v, vertices_[(i + n - 1) % n]));
    const Vec2 out = lt * backend_->log_map_short(v, vertices_[(i + 1) % n]);
    k[i] = std::atan2(cross2(in, out), in.dot(out)) / dual[i];
  }
  return k;
}

namespace {

int orient(const Point& a, const Point& b, const Point& c) {
  const double v = cross2(b - a, c - a);
  return (v > 0) - (v < 0);
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
         p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) || (o3 == 0 && on_segment(c, d, a)) ||
         (o4 == 0 && on_segment(c, d, b));
}

}  // namespace

bool Region::is_simple() const {
  const std::size_t n = size();
  // Sweep over edges sorted by their left x; only overlapping x-ranges are tested.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto lo = [&](std::size_t i) { return std::min(vertices_[i].x(), vertices_[(i + 1) % n].x()); };
  auto hi = [&](std::size_t i) { return std::max(vertices_[i].x(), vertices_[(i + 1) % n].x()); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lo(a) < lo(b); });
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t i = order[p];
    const double end = hi(i);
    for (std::size_t q = p + 1; q < n && lo(order[q]) <= end; ++q) {
      const std::size_t j = order[q];
      if ((i + 1) % n == j || (j + 1) % n == i) continue;
      if (segments_intersect(vertices_[i], vertices_[(i + 1) % n], vertices_[j], vertices_[(j + 1) % n])) return false;
    }
  }
  return true;
}

void Region::validate() const {
  if (!is_simple()) throw Error(ErrorCode::NotSimple, "polygon self-intersects");
  const double p = perimeter();
  if (!(signed_chart_area() > 0.0) || !(volume() > 1e-12 * p * p))
    throw Error(ErrorCode::DegeneratePolygon, "polygon is degenerate or clockwise");
}

nlohmann::json Region::to_json() const {
  nlohmann::json verts = nlohmann::json::array();
  for (const Point& v : vertices_) verts.push_back({v.x(), v.y()});
  return {{"backend", backend_->descriptor()}, {"vertices", verts}};
}

Region Region::from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.contains("backend") || !j.contains("vertices"))
    throw Error(ErrorCode::ConfigInvalid, "region: expected keys backend and vertices");
  std::vector<Point> v;
  for (const auto& p : j.at("vertices")) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::ConfigInvalid, "region.vertices: expected [x, y] pairs");
    v.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return Region(make_backend(j.at("backend"), base_dir), std::move(v));
}

void Region::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << std::setprecision(17) << "index,x,y,normal_x,normal_y,curvature\n";
  const auto normals = inward_normals();
  const auto k = curvature();
  for (std::size_t i = 0; i < size(); ++i)
    out << i << ',' << vertices_[i].x() << ',' << vertices_[i].y() << ',' << normals[i].x() << ',' << normals[i].y()
        << ',' << k[i] << '\n';
}

// ---------------------------------------------------------------------------

Region sample_curve(BackendPtr backend, const std::function<Point(double)>& curve, int n) {
  std::vector<Point> v(n);
  for (int i = 0; i < n; ++i) v[i] = curve(2.0 * M_PI * i / n);
  return Region(std::move(backend), std::move(v));
}

Region chart_ellipse(BackendPtr backend, const Point& center, double a, double b, int n, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return sample_curve(
      std::move(backend),
      [&](double t) {
        const Vec2 e(a * std::cos(t), b * std::sin(t));
        return Point(center + Vec2(c * e.x() - s * e.y(), s * e.x() + c * e.y()));
      },
      n);
}

Region metric_circle(BackendPtr backend, const Point& center, double r, int n) {
  const Eigen::LLT<Mat2> llt(backend->metric(center));
  const Mat2 lt = llt.matrixU();
  std::vector<Point> v(n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * i / n;
    const Vec2 u = lt.triangularView<Eigen::Upper>().solve(Vec2(std::cos(t), std::sin(t)));
    v[i] = backend->exp_map(center, r * u);
  }
  return Region(std::move(backend), std::move(v));
}

Region regular_polygon(BackendPtr backend, const Point& center, double radius, int n) {
  return sample_curve(
      std::move(backend), [&](double t) { return Point(center + radius * Vec2(std::cos(t), std::sin(t))); }, n);
}

LscReport lower_semicontinuity_witness(const std::vector<Region>& sequence, const Region& limit, double tol,
                                       std::size_t tail) {
  LscReport report;
  for (const Region& r : sequence) report.radii.push_back(rad(r).ball.radius);
  report.limit_radius = rad(limit).ball.radius;
  const std::size_t start = report.radii.size() > tail ? report.radii.size() - tail : 0;
  report.tail_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = start; i < report.radii.size(); ++i) report.tail_min = std::min(report.tail_min, report.radii[i]);
  report.holds = report.limit_radius <= report.tail_min + tol;
  return report;
}

}  // namespace isodiam
