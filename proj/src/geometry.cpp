#include "isodiam/geometry.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include <cmath>
#include <complex>
#include <filesystem>

namespace isodiam {

namespace odeint = boost::numeric::odeint;
using boost::math::quadrature::gauss;

std::string_view to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::EuclideanPlane: return "EuclideanPlane";
    case BackendKind::HyperbolicPlane: return "HyperbolicPlane";
    case BackendKind::Sphere: return "Sphere";
    case BackendKind::WarpedSurface: return "WarpedSurface";
    case BackendKind::EmbeddedSurface: return "EmbeddedSurface";
  }
  return "?";
}

namespace {

Vec2 contract(const Christoffel& gamma, const Vec2& u, const Vec2& w) {
  return {u.dot(gamma[0] * w), u.dot(gamma[1] * w)};
}

Christoffel polarize(const ManifoldBackend& m, const Point& x) {
  const Vec2 e1(1.0, 0.0), e2(0.0, 1.0);
  const Vec2 a1 = m.geodesic_acceleration(x, e1);
  const Vec2 a2 = m.geodesic_acceleration(x, e2);
  const Vec2 a12 = m.geodesic_acceleration(x, e1 + e2);
  const Vec2 mixed = -0.5 * (a12 - a1 - a2);
  Christoffel g;
  for (int k = 0; k < 2; ++k) {
    g[k](0, 0) = -a1[k];
    g[k](1, 1) = -a2[k];
    g[k](0, 1) = g[k](1, 0) = mixed[k];
  }
  return g;
}

// Fourth-order central differences of the metric.
std::array<Mat2, 2> fd_metric_derivative(const ManifoldBackend& m, const Point& x) {
  const double h = 1e-3 * std::max(1.0, x.norm());
  std::array<Mat2, 2> d;
  for (int k = 0; k < 2; ++k) {
    Vec2 e = Vec2::Zero();
    e[k] = h;
    d[k] = (8.0 * (m.metric(x + e) - m.metric(x - e)) - (m.metric(x + 2 * e) - m.metric(x - 2 * e))) / (12.0 * h);
  }
  return d;
}

// sin(k r)/r.
double sinc_k(double k, double r) {
  const double z = k * r;
  if (std::abs(z) < 1e-4) return k * (1.0 - z * z / 6.0);
  return std::sin(z) / r;
}

// (d/dr sin(k r)/r)/r.
double sinc_k_slope_over_r(double k, double r) {
  const double z = k * r;
  if (std::abs(z) < 1e-3) return k * k * k * (-1.0 / 3.0 + z * z / 30.0);
  return (z * std::cos(z) - std::sin(z)) / (r * r * r);
}

using State4 = std::array<double, 4>;
using State7 = std::array<double, 7>;

}  // namespace

// ---------------------------------------------------------------------------
// ManifoldBackend defaults

Christoffel ManifoldBackend::christoffel(const Point& x) const {
  const auto dg = fd_metric_derivative(*this, x);
  const Mat2 ginv = metric(x).inverse();
  Christoffel gamma;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l) s += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * s;
      }
  return gamma;
}

Vec2 ManifoldBackend::geodesic_acceleration(const Point& x, const Vec2& v) const {
  return -contract(christoffel(x), v, v);
}

double ManifoldBackend::area_density(const Point& x) const { return std::sqrt(metric(x).determinant()); }

std::array<Mat2, 2> ManifoldBackend::metric_derivative(const Point& x) const {
  const Christoffel gamma = christoffel(x);
  const Mat2 g = metric(x);
  std::array<Mat2, 2> d;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l) s += g(i, l) * gamma[l](k, j) + g(j, l) * gamma[l](k, i);
        d[k](i, j) = s;
      }
  return d;
}

double ManifoldBackend::norm(const Point& x, const Vec2& v) const { return std::sqrt(v.dot(metric(x) * v)); }

double ManifoldBackend::distance(const Point& p, const Point& q) const {
  if (auto d = closed_distance(p, q)) return *d;
  if (p == q) return 0.0;
  return norm(p, log_map(p, q));
}

Vec2 ManifoldBackend::log_map(const Point& p, const Point& q) const { return shoot(p, q); }

Vec2 ManifoldBackend::log_map_short(const Point& p, const Point& q) const {
  const Vec2 delta = q - p;
  return delta + 0.5 * contract(christoffel(p), delta, delta);
}

Point ManifoldBackend::exp_map(const Point& p, const Vec2& v, double step) const {
  if (!in_chart(p)) throw Error(ErrorCode::OutOfChart, "exp_map base point outside chart");
  const double len = norm(p, v);
  if (len == 0.0) return p;
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  odeint::runge_kutta4<State4> stepper;
  auto rhs = [this](const State4& s, State4& ds, double) {
    const Point x(s[0], s[1]);
    const Vec2 u(s[2], s[3]);
    const Vec2 a = geodesic_acceleration(x, u);
    ds = {u[0], u[1], a[0], a[1]};
  };
  State4 s{p[0], p[1], v[0], v[1]};
  const double dt = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    stepper.do_step(rhs, s, i * dt, dt);
    if (!in_chart(Point(s[0], s[1]))) throw Error(ErrorCode::OutOfChart, "geodesic left the chart");
  }
  return {s[0], s[1]};
}

Vec2 ManifoldBackend::shoot(const Point& p, const Point& q) const {
  Vec2 v = log_map_short(p, q);
  const double len0 = std::max(norm(p, v), 1e-300);
  const double step = std::min(opts_.step, len0 / 8.0);
  const double scale = std::max(1.0, q.norm());
  auto residual = [&](const Vec2& w) {
    const double dt = std::max(step, norm(p, w) / 4096.0);
    return Vec2(exp_map(p, w, dt) - q);
  };
  Vec2 f = residual(v);
  for (int it = 0; it < opts_.shooting_iterations; ++it) {
    if (f.norm() < opts_.shooting_tol * scale) return v;
    const double dt = std::max(step, norm(p, v) / 4096.0);
    const double eps = 1e-6 * std::max(v.norm(), 1e-8);
    Mat2 jac;
    for (int j = 0; j < 2; ++j) {
      Vec2 e = Vec2::Zero();
      e[j] = eps;
      jac.col(j) = (exp_map(p, v + e, dt) - exp_map(p, v - e, dt)) / (2.0 * eps);
    }
    const Vec2 delta = jac.partialPivLu().solve(f);
    // Damped update: halve while the trial leaves the chart or does not reduce the miss.
    double lambda = 1.0;
    bool moved = false;
    for (int k = 0; k < 30 && !moved; ++k, lambda *= 0.5) {
      try {
        const Vec2 trial = v - lambda * delta;
        const Vec2 ft = residual(trial);
        if (ft.norm() < f.norm() || k == 29) {
          v = trial;
          f = ft;
          moved = true;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::OutOfChart) throw;
      }
    }
    if (!moved) break;
  }
  throw Error(ErrorCode::NoConvergence, "geodesic shooting did not converge");
}

std::optional<double> ManifoldBackend::ball_boundary_curvature(const Point&, double) const { return std::nullopt; }

BallMeasures ManifoldBackend::ball_measures(const Point& center, double r, const FanOptions& fan) const {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
  if (!in_chart(center)) throw Error(ErrorCode::OutOfChart, "ball centre outside chart");
  if (auto closed = closed_ball(center, r)) {
    closed->excess = r * closed->perimeter / (2.0 * closed->volume) - 1.0;
    return *closed;
  }
  return fan_ball(center, r, fan);
}

BallMeasures ManifoldBackend::fan_ball(const Point& center, double r, const FanOptions& fan) const {
  const Eigen::LLT<Mat2> llt(metric(center));
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularMetric, "metric not positive definite");
  const Mat2 lt = llt.matrixU();  // L^T
  odeint::runge_kutta4<State7> stepper;
  // y = J - t for the Jacobi field J'' = -K J, J(0) = 0, J'(0) = 1 along the
  // unit-speed ray; s[6] accumulates the integral of y.
  auto rhs = [this](const State7& s, State7& ds, double t) {
    const Point x(s[0], s[1]);
    const Vec2 u(s[2], s[3]);
    const Vec2 a = geodesic_acceleration(x, u);
    ds = {u[0], u[1], a[0], a[1], s[5], -gaussian_curvature(x) * (t + s[4]), s[4]};
  };
  const double h = r / fan.steps;
  double sum_y = 0.0, sum_Y = 0.0;
  for (int j = 0; j < fan.rays; ++j) {
    const double theta = 2.0 * M_PI * j / fan.rays;
    const Vec2 w = lt.triangularView<Eigen::Upper>().solve(Vec2(std::cos(theta), std::sin(theta)));
    State7 s{center[0], center[1], w[0], w[1], 0.0, 0.0, 0.0};
    for (int i = 0; i < fan.steps; ++i) stepper.do_step(rhs, s, i * h, h);
    if (!in_chart(Point(s[0], s[1]))) throw Error(ErrorCode::OutOfChart, "ball exits the chart");
    sum_y += s[4];
    sum_Y += s[6];
  }
  const double dtheta = 2.0 * M_PI / fan.rays;
  BallMeasures b;
  b.volume = M_PI * r * r + sum_Y * dtheta;
  b.perimeter = 2.0 * M_PI * r + sum_y * dtheta;
  b.excess = (r * sum_y - 2.0 * sum_Y) * dtheta / (2.0 * b.volume);
  return b;
}

double ManifoldBackend::fan_triangle_area(const Point& a, const Point& b) const {
  const Point o = apex();
  const Vec2 da = a - o, db = b - a;
  auto inner = [&](double u) {
    return gauss<double, 16>::integrate([&](double w) { return area_density(o + u * (da + w * db)); }, 0.0, 1.0) * u;
  };
  return cross2(da, b - o) * gauss<double, 16>::integrate(inner, 0.0, 1.0);
}

double ManifoldBackend::chord_length(const Point& a, const Point& b) const {
  const Vec2 d = b - a;
  return std::sqrt(d.dot(metric(0.5 * (a + b)) * d));
}

std::pair<Vec2, Vec2> ManifoldBackend::chord_length_gradient(const Point& a, const Point& b) const {
  const Vec2 d = b - a;
  const Point mid = 0.5 * (a + b);
  const Mat2 g = metric(mid);
  const double len = std::sqrt(d.dot(g * d));
  if (len == 0.0) return {Vec2::Zero(), Vec2::Zero()};
  const auto dg = metric_derivative(mid);
  const Vec2 half(0.25 * d.dot(dg[0] * d), 0.25 * d.dot(dg[1] * d));
  const Vec2 gd = g * d;
  return {(-gd + half) / len, (gd + half) / len};
}

double ManifoldBackend::edge_length(const Point& a, const Point& b) const {
  if (auto d = closed_distance(a, b)) return *d;
  return chord_length(a, b);
}

std::pair<Vec2, Vec2> ManifoldBackend::edge_length_gradient(const Point& a, const Point& b) const {
  return chord_length_gradient(a, b);
}

// ---------------------------------------------------------------------------
// Euclidean

std::pair<Vec2, Vec2> EuclideanPlane::edge_length_gradient(const Point& a, const Point& b) const {
  const Vec2 d = b - a;
  const double len = d.norm();
  if (len == 0.0) return {Vec2::Zero(), Vec2::Zero()};
  return {-d / len, d / len};
}

std::optional<BallMeasures> EuclideanPlane::closed_ball(const Point&, double r) const {
  return BallMeasures{M_PI * r * r, 2.0 * M_PI * r};
}

// ---------------------------------------------------------------------------
// Hyperbolic

HyperbolicPlane::HyperbolicPlane(double curvature, GeodesicOptions opts) : ManifoldBackend(opts) {
  if (!(curvature < 0.0)) throw Error(ErrorCode::InvalidArgument, "hyperbolic curvature must be negative");
  k_ = std::sqrt(-curvature);
}

double HyperbolicPlane::conformal_factor(const Point& x) const { return 2.0 / (k_ * (1.0 - x.squaredNorm())); }

Mat2 HyperbolicPlane::metric(const Point& x) const {
  const double l = conformal_factor(x);
  return l * l * Mat2::Identity();
}

double HyperbolicPlane::area_density(const Point& x) const {
  const double l = conformal_factor(x);
  return l * l;
}

Christoffel HyperbolicPlane::christoffel(const Point& x) const {
  const Vec2 sigma = 2.0 * x / (1.0 - x.squaredNorm());
  Christoffel g;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        g[k](i, j) = (i == k ? sigma[j] : 0.0) + (j == k ? sigma[i] : 0.0) - (i == j ? sigma[k] : 0.0);
  return g;
}

Vec2 HyperbolicPlane::geodesic_acceleration(const Point& x, const Vec2& v) const {
  const Vec2 sigma = 2.0 * x / (1.0 - x.squaredNorm());
  return -(2.0 * sigma.dot(v) * v - v.squaredNorm() * sigma);
}

std::optional<double> HyperbolicPlane::closed_distance(const Point& p, const Point& q) const {
  const std::complex<double> zp(p.x(), p.y()), zq(q.x(), q.y());
  const double ratio = std::abs(zq - zp) / std::abs(1.0 - std::conj(zp) * zq);
  return 2.0 / k_ * std::atanh(ratio);
}

Vec2 HyperbolicPlane::log_map(const Point& p, const Point& q) const {
  const std::complex<double> zp(p.x(), p.y()), zq(q.x(), q.y());
  const std::complex<double> t = (zq - zp) / (1.0 - std::conj(zp) * zq);
  const double mod = std::abs(t);
  if (mod == 0.0) return Vec2::Zero();
  const double len = 2.0 / k_ * std::atanh(mod) / conformal_factor(p);
  return Vec2(t.real(), t.imag()) * (len / mod);
}

Point HyperbolicPlane::point_at(double t, double theta) const {
  const double rho = std::tanh(0.5 * k_ * t);
  return {rho * std::cos(theta), rho * std::sin(theta)};
}

std::optional<BallMeasures> HyperbolicPlane::closed_ball(const Point&, double r) const {
  const double s = std::sinh(0.5 * k_ * r);
  return BallMeasures{2.0 * M_PI / (k_ * k_) * 2.0 * s * s, 2.0 * M_PI / k_ * std::sinh(k_ * r)};
}

std::optional<double> HyperbolicPlane::ball_boundary_curvature(const Point&, double r) const {
  return k_ / std::tanh(k_ * r);
}

double HyperbolicPlane::fan_triangle_area(const Point& a, const Point& b) const {
  const Vec2 d = b - a;
  const double c = 2.0 / (k_ * k_);
  const double integral =
      gauss<double, 20>::integrate([&](double t) { return c / (1.0 - (a + t * d).squaredNorm()); }, 0.0, 1.0);
  return cross2(a, b) * integral;
}

double HyperbolicPlane::edge_length(const Point& a, const Point& b) const { return *closed_distance(a, b); }

std::pair<Vec2, Vec2> HyperbolicPlane::edge_length_gradient(const Point& a, const Point& b) const {
  const double d = *closed_distance(a, b);
  if (d == 0.0) return {Vec2::Zero(), Vec2::Zero()};
  const double la = conformal_factor(a), lb = conformal_factor(b);
  return {-la * la * log_map(a, b) / d, -lb * lb * log_map(b, a) / d};
}

// ---------------------------------------------------------------------------
// Warped

WarpedSurface::WarpedSurface(std::shared_ptr<const WarpProfile> profile, GeodesicOptions opts)
    : ManifoldBackend(opts), profile_(std::move(profile)) {
  if (!profile_) throw Error(ErrorCode::InvalidArgument, "null warp profile");
}

bool WarpedSurface::in_chart(const Point& x) const {
  return x.allFinite() && x.norm() < profile_->max_radius();
}

Mat2 WarpedSurface::metric(const Point& x) const {
  const double r = x.norm();
  if (r < 1e-300) return Mat2::Identity();
  const Vec2 n = x / r;
  const double q = 1.0 - profile_->deficit(r) / r;
  const Mat2 radial = n * n.transpose();
  return radial + q * q * (Mat2::Identity() - radial);
}

Vec2 WarpedSurface::geodesic_acceleration(const Point& x, const Vec2& v) const {
  const double r = x.norm();
  if (r < 1e-300) return Vec2::Zero();
  const Vec2 n = x / r;
  const Vec2 t = rot_ccw(n);
  const double theta_dot = cross2(x, v) / (r * r);
  const double r_dot = n.dot(v);
  const double d = profile_->deficit(r);
  const double s = profile_->slope_deficit(r);
  const double phi = r - d;
  // phi phi' - r and 1 - r phi'/phi written through the deficits.
  const double radial = -d - r * s + d * s;
  const double tangential = (r * s - d) / phi;
  return theta_dot * theta_dot * radial * n + 2.0 * r_dot * theta_dot * tangential * t;
}

Christoffel WarpedSurface::christoffel(const Point& x) const { return polarize(*this, x); }

double WarpedSurface::gaussian_curvature(const Point& x) const { return profile_->gaussian_curvature(x.norm()); }

double WarpedSurface::area_density(const Point& x) const {
  const double r = x.norm();
  if (r < 1e-300) return 1.0;
  return 1.0 - profile_->deficit(r) / r;
}

std::optional<double> WarpedSurface::closed_distance(const Point& p, const Point& q) const {
  if (at_apex(p)) return q.norm();
  if (at_apex(q)) return p.norm();
  return std::nullopt;
}

Vec2 WarpedSurface::log_map(const Point& p, const Point& q) const {
  if (at_apex(p)) return q - p;
  return shoot(p, q);
}

std::optional<BallMeasures> WarpedSurface::closed_ball(const Point& center, double r) const {
  if (!at_apex(center)) return std::nullopt;
  if (r >= profile_->max_radius()) throw Error(ErrorCode::OutOfChart, "ball exits the chart");
  return BallMeasures{2.0 * M_PI * profile_->integral(r), 2.0 * M_PI * profile_->value(r)};
}

std::optional<double> WarpedSurface::ball_boundary_curvature(const Point& center, double r) const {
  if (!at_apex(center)) return std::nullopt;
  return profile_->slope(r) / profile_->value(r);
}

double WarpedSurface::fan_triangle_area(const Point& a, const Point& b) const {
  if (profile_->is_flat()) return 0.5 * cross2(a, b);
  const Vec2 d = b - a;
  const double integral = gauss<double, 20>::integrate(
      [&](double t) {
        const double r = (a + t * d).norm();
        if (r < 1e-6) return 0.5;
        return profile_->integral(r) / (r * r);
      },
      0.0, 1.0);
  return cross2(a, b) * integral;
}

double WarpedSurface::edge_length(const Point& a, const Point& b) const {
  if (profile_->is_flat()) return (b - a).norm();
  return chord_length(a, b);
}

std::pair<Vec2, Vec2> WarpedSurface::edge_length_gradient(const Point& a, const Point& b) const {
  if (profile_->is_flat()) {
    const Vec2 d = b - a;
    const double len = d.norm();
    if (len == 0.0) return {Vec2::Zero(), Vec2::Zero()};
    return {-d / len, d / len};
  }
  return chord_length_gradient(a, b);
}

// ---------------------------------------------------------------------------
// Sphere

SphereSurface::SphereSurface(double curvature, GeodesicOptions opts)
    : WarpedSurface(std::make_shared<SineProfile>(curvature), opts), k_(std::sqrt(curvature)) {}

Point3 SphereSurface::unit_embed(const Point& x) const {
  const double r = x.norm();
  const double s = sinc_k(k_, r);
  return {s * x.x(), s * x.y(), std::cos(k_ * r)};
}

Eigen::Matrix<double, 3, 2> SphereSurface::unit_embed_jacobian(const Point& x) const {
  const double r = x.norm();
  const double s = sinc_k(k_, r);
  const double sp = sinc_k_slope_over_r(k_, r);
  Eigen::Matrix<double, 3, 2> j;
  j.topRows<2>() = s * Mat2::Identity() + sp * x * x.transpose();
  j.row(2) = -k_ * s * x.transpose();
  return j;
}

std::optional<Point3> SphereSurface::embed(const Point& x) const { return Point3(unit_embed(x) / k_); }

std::optional<double> SphereSurface::closed_distance(const Point& p, const Point& q) const {
  const Point3 u = unit_embed(p), w = unit_embed(q);
  return std::atan2(u.cross(w).norm(), u.dot(w)) / k_;
}

Vec2 SphereSurface::log_map(const Point& p, const Point& q) const {
  const Point3 u = unit_embed(p), w = unit_embed(q);
  const Point3 perp = w - u.dot(w) * u;
  const double pn = perp.norm();
  if (pn == 0.0) return Vec2::Zero();
  const double angle = std::atan2(u.cross(w).norm(), u.dot(w));
  const auto j = unit_embed_jacobian(p);
  return (j.transpose() * j).ldlt().solve(j.transpose() * (angle / pn * perp));
}

std::optional<BallMeasures> SphereSurface::closed_ball(const Point&, double r) const {
  if (r > M_PI / k_) throw Error(ErrorCode::OutOfChart, "ball radius exceeds the sphere diameter");
  const double s = std::sin(0.5 * k_ * r);
  return BallMeasures{2.0 * M_PI * 2.0 * s * s / (k_ * k_), 2.0 * M_PI * std::sin(k_ * r) / k_};
}

std::optional<double> SphereSurface::ball_boundary_curvature(const Point&, double r) const {
  return k_ / std::tan(k_ * r);
}

double SphereSurface::edge_length(const Point& a, const Point& b) const { return *closed_distance(a, b); }

std::pair<Vec2, Vec2> SphereSurface::edge_length_gradient(const Point& a, const Point& b) const {
  const Point3 u = unit_embed(a), w = unit_embed(b);
  const Point3 wp = w - u.dot(w) * u;
  const Point3 up = u - u.dot(w) * w;
  const double nw = wp.norm(), nu = up.norm();
  if (nw == 0.0 || nu == 0.0) return {Vec2::Zero(), Vec2::Zero()};
  return {-(unit_embed_jacobian(a).transpose() * wp) / (nw * k_),
          -(unit_embed_jacobian(b).transpose() * up) / (nu * k_)};
}

// ---------------------------------------------------------------------------
// Helicoid

Mat2 HelicoidSurface::metric(const Point& x) const {
  Mat2 g = Mat2::Identity();
  g(1, 1) = 1.0 + x.x() * x.x();
  return g;
}

Christoffel HelicoidSurface::christoffel(const Point& x) const {
  const double s = x.x();
  Christoffel g{Mat2::Zero(), Mat2::Zero()};
  g[0](1, 1) = -s;
  g[1](0, 1) = g[1](1, 0) = s / (1.0 + s * s);
  return g;
}

double HelicoidSurface::gaussian_curvature(const Point& x) const {
  const double w = 1.0 + x.x() * x.x();
  return -1.0 / (w * w);
}

double HelicoidSurface::area_density(const Point& x) const { return std::sqrt(1.0 + x.x() * x.x()); }

std::optional<Point3> HelicoidSurface::embed(const Point& x) const {
  return Point3(x.x() * std::cos(x.y()), x.x() * std::sin(x.y()), x.y());
}

// ---------------------------------------------------------------------------
// Catenoid

Mat2 CatenoidSurface::metric(const Point& x) const {
  const double c = std::cosh(x.x());
  return c * c * Mat2::Identity();
}

Christoffel CatenoidSurface::christoffel(const Point& x) const {
  const Vec2 sigma(std::tanh(x.x()), 0.0);
  Christoffel g;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        g[k](i, j) = (i == k ? sigma[j] : 0.0) + (j == k ? sigma[i] : 0.0) - (i == j ? sigma[k] : 0.0);
  return g;
}

double CatenoidSurface::gaussian_curvature(const Point& x) const {
  const double c = std::cosh(x.x());
  return -1.0 / (c * c * c * c);
}

double CatenoidSurface::area_density(const Point& x) const {
  const double c = std::cosh(x.x());
  return c * c;
}

Vec2 CatenoidSurface::log_map(const Point& p, const Point& q) const {
  // theta is periodic: take the shortest lift.
  const double wrapped = std::remainder(q.y() - p.y(), 2.0 * M_PI);
  Vec2 best = Vec2::Zero();
  double best_len = std::numeric_limits<double>::infinity();
  for (int m : {0, -1, 1}) {
    const Point lift(q.x(), p.y() + wrapped + 2.0 * M_PI * m);
    // cosh t >= 1 bounds the length of this lift from below by its theta span.
    if (std::abs(lift.y() - p.y()) >= best_len) continue;
    try {
      const Vec2 v = shoot(p, lift);
      const double len = norm(p, v);
      if (len < best_len) {
        best_len = len;
        best = v;
      }
    } catch (const Error&) {
      if (m == 0) throw;
    }
  }
  return best;
}

std::optional<Point3> CatenoidSurface::embed(const Point& x) const {
  const double c = std::cosh(x.x());
  return Point3(c * std::cos(x.y()), c * std::sin(x.y()), x.x());
}

// ---------------------------------------------------------------------------

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || it.key() == key;
    if (!ok) throw Error(ErrorCode::ConfigInvalid, "backend." + it.key() + ": unknown key");
  }
}

double number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw Error(ErrorCode::ConfigInvalid, std::string("backend.") + key + ": expected a number");
  return j.at(key).get<double>();
}

}  // namespace

BackendPtr make_backend(const nlohmann::json& d, const std::string& base_dir, GeodesicOptions opts) {
  if (!d.is_object() || !d.contains("kind") || !d.at("kind").is_string())
    throw Error(ErrorCode::ConfigInvalid, "backend.kind: missing or not a string");
  const std::string kind = d.at("kind").get<std::string>();
  opts.step = number(d, "geodesic_step", opts.step);
  try {
    if (kind == "euclidean") {
      reject_unknown(d, {"kind", "geodesic_step"});
      return std::make_shared<EuclideanPlane>(opts);
    }
    if (kind == "hyperbolic") {
      reject_unknown(d, {"kind", "K", "geodesic_step"});
      return std::make_shared<HyperbolicPlane>(number(d, "K", -1.0), opts);
    }
    if (kind == "sphere") {
      reject_unknown(d, {"kind", "K", "geodesic_step"});
      return std::make_shared<SphereSurface>(number(d, "K", 1.0), opts);
    }
    if (kind == "warped") {
      reject_unknown(d, {"kind", "a", "profile_csv", "geodesic_step"});
      if (d.contains("profile_csv") == d.contains("a"))
        throw Error(ErrorCode::ConfigInvalid, "backend.a: exactly one of a, profile_csv is required");
      if (d.contains("a")) return std::make_shared<WarpedSurface>(std::make_shared<TanhProfile>(number(d, "a", 1.0)), opts);
      std::filesystem::path path = d.at("profile_csv").get<std::string>();
      if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
      return std::make_shared<WarpedSurface>(std::make_shared<TabulatedProfile>(TabulatedProfile::from_csv(path)),
                                             opts);
    }
    if (kind == "helicoid") {
      reject_unknown(d, {"kind", "geodesic_step"});
      return std::make_shared<HelicoidSurface>(opts);
    }
    if (kind == "catenoid") {
      reject_unknown(d, {"kind", "geodesic_step"});
      return std::make_shared<CatenoidSurface>(opts);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::ConfigInvalid, std::string("backend: ") + e.what());
    throw;
  }
  throw Error(ErrorCode::ConfigInvalid, "backend.kind: unknown backend '" + kind + "'");
}

bool validate_curvature_sign(const ManifoldBackend& m, double extent, int samples, double slack) {
  if (auto* w = dynamic_cast<const WarpedSurface*>(&m))
    return curvature_sign_consistent(w->profile(), std::min(extent, w->profile().max_radius() * (1 - 1e-9)),
                                     samples * samples, slack);
  const CurvatureSign sign = m.curvature_sign();
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j) {
      const Point x = m.apex() + extent * Point(2.0 * i / (samples - 1) - 1.0, 2.0 * j / (samples - 1) - 1.0);
      if (!m.in_chart(x)) continue;
      const Eigen::SelfAdjointEigenSolver<Mat2> eig(m.metric(x));
      if (!(eig.eigenvalues().minCoeff() > 0.0)) return false;
      const double k = m.gaussian_curvature(x);
      if (sign == CurvatureSign::NonNegative && k < -slack) return false;
      if (sign == CurvatureSign::NonPositive && k > slack) return false;
    }
  return true;
}

double cone_deviation(const WarpProfile& profile, double d) {
  const double c = profile.slope(d);
  return std::abs(profile.value(d) / (c * d) - 1.0);
}

}  // namespace isodiam
