#include "isodiam/catalog.hpp"

#include "isodiam/geometry.hpp"
#include "isodiam/meb.hpp"
#include "isodiam/region.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace isodiam {

namespace {

double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  if (f(lo) * f(hi) > 0.0) throw Error(ErrorCode::RootFindFailed, "bracket does not change sign");
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, [](double x, double y) { return std::abs(x - y) < 1e-13; });
  return 0.5 * (a + b);
}

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  // Near-parallel vectors: the sine from the rejection is better conditioned.
  const Eigen::VectorXd rej = a / a.norm() - c * b / b.norm();
  return std::atan2(rej.norm(), c);
}

}  // namespace

double TruncatedCatenoid::area() const { return 2 * M_PI * (T + std::sinh(T) * std::cosh(T)); }
double TruncatedCatenoid::boundary_length() const { return 4 * M_PI * std::cosh(T); }
double TruncatedCatenoid::ambient_radius() const { return std::hypot(std::cosh(T), T); }

Point3 TruncatedCatenoid::point(double t, double theta) const {
  return {std::cosh(t) * std::cos(theta), std::cosh(t) * std::sin(theta), t};
}

Point3 TruncatedCatenoid::dt(double t, double theta) const {
  return {std::sinh(t) * std::cos(theta), std::sinh(t) * std::sin(theta), 1.0};
}

double critical_catenoid_T0() {
  return bisect_root([](double t) { return t - 1.0 / std::tanh(t); }, 1.0, 1.5);
}

double critical_mobius_T0() {
  return bisect_root([](double t) { return 1.0 / std::tanh(t) - 2.0 * std::tanh(2.0 * t); }, 0.05, 3.0);
}

Eigen::Vector4d mobius_point(double t, double th) {
  return {2 * std::sinh(t) * std::cos(th), 2 * std::sinh(t) * std::sin(th), std::cosh(2 * t) * std::cos(2 * th),
          std::cosh(2 * t) * std::sin(2 * th)};
}

Eigen::Vector4d mobius_dt(double t, double th) {
  return {2 * std::cosh(t) * std::cos(th), 2 * std::cosh(t) * std::sin(th), 2 * std::sinh(2 * t) * std::cos(2 * th),
          2 * std::sinh(2 * t) * std::sin(2 * th)};
}

double minimal_ratio(double T) {
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "truncation height must be positive");
  const double c = std::cosh(T);
  return (T + std::sinh(T) * c) / (c * std::hypot(c, T));
}

MeshMeasures catenoid_mesh(double T, int n_theta, int n_t, std::uint64_t seed) {
  if (n_t % 2 != 0 || n_t < 2 || n_theta < 3) throw Error(ErrorCode::InvalidArgument, "mesh needs even n_t and n_theta >= 3");
  const TruncatedCatenoid cat{T};
  MeshMeasures m;
  const double dt = 2 * T / n_t, dth = 2 * M_PI / n_theta;
  std::vector<Point3> cloud;
  cloud.reserve(static_cast<std::size_t>(n_theta) * (n_t + 1));
  for (int i = 0; i <= n_t; ++i) {
    const double t = -T + i * dt;
    const double simpson = (i == 0 || i == n_t) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (int j = 0; j < n_theta; ++j) {
      const double th = j * dth;
      cloud.push_back(cat.point(t, th));
      // Surface element |phi_t x phi_theta| from the analytic tangents at this node.
      const Point3 pt = cat.dt(t, th);
      const Point3 pth(-std::cosh(t) * std::sin(th), std::cosh(t) * std::cos(th), 0.0);
      m.area += simpson * dt / 3.0 * dth * pt.cross(pth).norm();
    }
  }
  for (int ring : {0, n_t})
    for (int j = 0; j < n_theta; ++j) {
      const std::size_t base = static_cast<std::size_t>(ring) * n_theta;
      m.boundary_length += (cloud[base + (j + 1) % n_theta] - cloud[base + j]).norm();
    }
  const EnclosingBall ball = welzl(cloud, seed);
  m.ambient_radius = ball.radius;
  m.center = ball.center.head<3>();
  m.ratio = 2.0 * m.area / (m.ambient_radius * m.boundary_length);
  for (double t : {-T, T})
    for (int j = 0; j < n_theta; ++j) {
      const double th = j * dth;
      const Point3 conormal = (t > 0 ? 1.0 : -1.0) * cat.dt(t, th);
      m.max_conormal_angle = std::max(m.max_conormal_angle, angle_between(conormal, cat.point(t, th) - m.center));
    }
  return m;
}

double mobius_conormal_angle(double T, int n_theta) {
  double worst = 0.0;
  for (int j = 0; j < n_theta; ++j) {
    const double th = 2 * M_PI * j / n_theta;
    worst = std::max(worst, angle_between(mobius_dt(T, th), mobius_point(T, th)));
  }
  return worst;
}

DominanceReport intrinsic_dominance(double T, int rings, int per_ring) {
  const auto surface = std::make_shared<CatenoidSurface>();
  std::vector<Point> pts;
  for (int r = 0; r < rings; ++r) {
    const double t = rings == 1 ? 0.0 : -T + 2 * T * r / (rings - 1);
    for (int j = 0; j < per_ring; ++j) pts.emplace_back(t, 2 * M_PI * j / per_ring);
  }
  DominanceReport rep;
  rep.intrinsic = geodesic_one_center(pts, *surface).radius;
  rep.ambient = TruncatedCatenoid{T}.ambient_radius();
  rep.holds = rep.intrinsic >= rep.ambient;
  return rep;
}

DiskCheck equatorial_disk_check(int N, double r, Point center) {
  const Region poly = regular_polygon(std::make_shared<EuclideanPlane>(), center, r, N);
  const double rad_value = rad(poly).ball.radius;
  return {2.0 * poly.volume() / (rad_value * poly.perimeter()), 1.0};
}

DiskCheck annulus_check(double a, int N, double r) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidArgument, "hole fraction must lie in (0, 1)");
  const auto plane = std::make_shared<EuclideanPlane>();
  const Region outer = regular_polygon(plane, Point::Zero(), r, N);
  const Region hole = regular_polygon(plane, Point::Zero(), a * r, N);
  const double area = outer.volume() - hole.volume();
  const double length = outer.perimeter() + hole.perimeter();
  return {2.0 * area / (rad(outer).ball.radius * length), 1.0 - a};
}

std::vector<SweepRow> ratio_sweep(double T_min, double T_max, int samples, int n_theta, int n_t) {
  std::vector<SweepRow> rows;
  for (int i = 0; i < samples; ++i) {
    const double T = samples == 1 ? T_min : T_min + (T_max - T_min) * i / (samples - 1);
    const double rho = minimal_ratio(T);
    const double disc = n_theta > 0 ? std::abs(catenoid_mesh(T, n_theta, n_t).ratio - rho) : 0.0;
    rows.push_back({T, rho, disc});
  }
  return rows;
}

PeakReport peaks(const std::vector<SweepRow>& rows) {
  PeakReport rep;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 || rows[i].rho > rep.rho_max) {
      rep.rho_max = rows[i].rho;
      rep.T_max = rows[i].T;
    }
    if (i > 0 && i + 1 < rows.size() && rows[i].rho > rows[i - 1].rho && rows[i].rho > rows[i + 1].rho)
      ++rep.interior_maxima;
  }
  return rep;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << std::setprecision(17) << "T,rho,discrepancy\n";
  for (const auto& r : rows) out << r.T << ',' << r.rho << ',' << r.discrepancy << '\n';
}

}  // namespace isodiam
