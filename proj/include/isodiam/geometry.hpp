#pragma once

#include "isodiam/common.hpp"
#include "isodiam/warp_profile.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <memory>
#include <optional>
#include <string>

namespace isodiam {

enum class BackendKind { EuclideanPlane, HyperbolicPlane, Sphere, WarpedSurface, EmbeddedSurface };

std::string_view to_string(BackendKind kind) noexcept;

struct BallMeasures {
  double volume = 0.0;
  double perimeter = 0.0;
  /// r P / (2 V) - 1. The fan integrates it from the deviation of the Jacobi
  /// field from t, so nearly flat balls keep relative precision.
  double excess = 0.0;
};

struct GeodesicOptions {
  double step = 1e-2;        // arclength step of the RK4 integrator
  int shooting_iterations = 50;
  double shooting_tol = 1e-12;
};

struct FanOptions {
  int rays = 512;
  int steps = 256;  // RK4 steps per ray
};

/// Christoffel symbols: gamma[k](i, j) = Gamma^k_ij.
using Christoffel = std::array<Mat2, 2>;

/// A two-dimensional model geometry in a single global chart.
///
/// Backends are immutable once built. Derived classes override the closed
/// forms they have; the base class supplies shooting and finite-difference
/// fallbacks for everything else.
class ManifoldBackend {
 public:
  explicit ManifoldBackend(GeodesicOptions opts = {}) : opts_(opts) {}
  virtual ~ManifoldBackend() = default;

  virtual BackendKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual CurvatureSign curvature_sign() const = 0;
  virtual bool is_flat() const { return false; }
  virtual nlohmann::json descriptor() const = 0;

  virtual bool in_chart(const Point& x) const = 0;
  virtual Mat2 metric(const Point& x) const = 0;
  virtual Christoffel christoffel(const Point& x) const;
  /// Second derivative of a geodesic through x with velocity v: -Gamma(v, v).
  virtual Vec2 geodesic_acceleration(const Point& x, const Vec2& v) const;
  virtual double gaussian_curvature(const Point& x) const = 0;
  /// sqrt(det g).
  virtual double area_density(const Point& x) const;
  /// Partial derivatives d_k g_ij, k = 0, 1.
  std::array<Mat2, 2> metric_derivative(const Point& x) const;

  double distance(const Point& p, const Point& q) const;
  /// Tangent vector at p whose geodesic reaches q at time 1.
  virtual Vec2 log_map(const Point& p, const Point& q) const;
  /// Third-order accurate log for nearby points, cheap.
  virtual Vec2 log_map_short(const Point& p, const Point& q) const;
  Point exp_map(const Point& p, const Vec2& v) const { return exp_map(p, v, opts_.step); }
  Point exp_map(const Point& p, const Vec2& v, double step) const;

  /// Metric norm of v at x.
  double norm(const Point& x, const Vec2& v) const;

  /// Centre used by apex closed forms and fan triangulation.
  virtual Point apex() const { return Point::Zero(); }

  BallMeasures ball_measures(const Point& center, double r, const FanOptions& fan = {}) const;
  /// Geodesic curvature of the circle of radius r about `center`, if closed form.
  virtual std::optional<double> ball_boundary_curvature(const Point& center, double r) const;

  /// Signed area of the chart triangle (apex, a, b) with straight chart edges.
  virtual double fan_triangle_area(const Point& a, const Point& b) const;
  /// Length of the polygon edge ab and its derivatives with respect to a and b.
  virtual double edge_length(const Point& a, const Point& b) const;
  virtual std::pair<Vec2, Vec2> edge_length_gradient(const Point& a, const Point& b) const;

  virtual std::optional<Point3> embed(const Point&) const { return std::nullopt; }

  const GeodesicOptions& geodesic_options() const { return opts_; }

 protected:
  virtual std::optional<double> closed_distance(const Point&, const Point&) const { return std::nullopt; }
  virtual std::optional<BallMeasures> closed_ball(const Point&, double) const { return std::nullopt; }
  Vec2 shoot(const Point& p, const Point& q) const;
  BallMeasures fan_ball(const Point& center, double r, const FanOptions& fan) const;
  /// Chart-straight segment length by the midpoint rule and its exact gradient.
  double chord_length(const Point& a, const Point& b) const;
  std::pair<Vec2, Vec2> chord_length_gradient(const Point& a, const Point& b) const;

  GeodesicOptions opts_;
};

using BackendPtr = std::shared_ptr<const ManifoldBackend>;

class EuclideanPlane final : public ManifoldBackend {
 public:
  using ManifoldBackend::ManifoldBackend;
  BackendKind kind() const override { return BackendKind::EuclideanPlane; }
  std::string name() const override { return "euclidean"; }
  CurvatureSign curvature_sign() const override { return CurvatureSign::NonPositive; }
  bool is_flat() const override { return true; }
  nlohmann::json descriptor() const override { return {{"kind", "euclidean"}}; }
  bool in_chart(const Point& x) const override { return x.allFinite(); }
  Mat2 metric(const Point&) const override { return Mat2::Identity(); }
  Christoffel christoffel(const Point&) const override { return {Mat2::Zero(), Mat2::Zero()}; }
  Vec2 geodesic_acceleration(const Point&, const Vec2&) const override { return Vec2::Zero(); }
  double gaussian_curvature(const Point&) const override { return 0.0; }
  double area_density(const Point&) const override { return 1.0; }
  Vec2 log_map(const Point& p, const Point& q) const override { return q - p; }
  Vec2 log_map_short(const Point& p, const Point& q) const override { return q - p; }
  std::optional<double> ball_boundary_curvature(const Point&, double r) const override { return 1.0 / r; }
  double fan_triangle_area(const Point& a, const Point& b) const override { return 0.5 * cross2(a, b); }
  double edge_length(const Point& a, const Point& b) const override { return (b - a).norm(); }
  std::pair<Vec2, Vec2> edge_length_gradient(const Point& a, const Point& b) const override;
  std::optional<Point3> embed(const Point& x) const override { return Point3(x.x(), x.y(), 0.0); }

 protected:
  std::optional<double> closed_distance(const Point& p, const Point& q) const override { return (q - p).norm(); }
  std::optional<BallMeasures> closed_ball(const Point&, double r) const override;
};

/// Poincare disk model of curvature K = -k^2, chart |x| < 1.
class HyperbolicPlane final : public ManifoldBackend {
 public:
  explicit HyperbolicPlane(double curvature = -1.0, GeodesicOptions opts = {});
  double curvature() const { return -k_ * k_; }

  BackendKind kind() const override { return BackendKind::HyperbolicPlane; }
  std::string name() const override { return "hyperbolic"; }
  CurvatureSign curvature_sign() const override { return CurvatureSign::NonPositive; }
  nlohmann::json descriptor() const override { return {{"kind", "hyperbolic"}, {"K", curvature()}}; }
  bool in_chart(const Point& x) const override { return x.allFinite() && x.squaredNorm() < 1.0; }
  Mat2 metric(const Point& x) const override;
  Christoffel christoffel(const Point& x) const override;
  Vec2 geodesic_acceleration(const Point& x, const Vec2& v) const override;
  double gaussian_curvature(const Point&) const override { return -k_ * k_; }
  double area_density(const Point& x) const override;
  Vec2 log_map(const Point& p, const Point& q) const override;
  Vec2 log_map_short(const Point& p, const Point& q) const override { return log_map(p, q); }
  std::optional<double> ball_boundary_curvature(const Point&, double r) const override;
  double fan_triangle_area(const Point& a, const Point& b) const override;
  double edge_length(const Point& a, const Point& b) const override;
  std::pair<Vec2, Vec2> edge_length_gradient(const Point& a, const Point& b) const override;

  /// Conformal factor lambda(x) = 2/(k (1 - |x|^2)).
  double conformal_factor(const Point& x) const;
  /// Chart point at distance t from the origin in direction angle theta.
  Point point_at(double t, double theta) const;

 protected:
  std::optional<double> closed_distance(const Point& p, const Point& q) const override;
  std::optional<BallMeasures> closed_ball(const Point&, double r) const override;

 private:
  double k_;
};

/// Surface of revolution dr^2 + phi(r)^2 dtheta^2 in normal coordinates at the apex.
class WarpedSurface : public ManifoldBackend {
 public:
  explicit WarpedSurface(std::shared_ptr<const WarpProfile> profile, GeodesicOptions opts = {});

  const WarpProfile& profile() const { return *profile_; }

  BackendKind kind() const override { return BackendKind::WarpedSurface; }
  std::string name() const override { return "warped"; }
  CurvatureSign curvature_sign() const override { return profile_->declared_sign(); }
  bool is_flat() const override { return profile_->is_flat(); }
  nlohmann::json descriptor() const override { return profile_->descriptor(); }
  bool in_chart(const Point& x) const override;
  Mat2 metric(const Point& x) const override;
  Christoffel christoffel(const Point& x) const override;
  Vec2 geodesic_acceleration(const Point& x, const Vec2& v) const override;
  double gaussian_curvature(const Point& x) const override;
  double area_density(const Point& x) const override;
  Vec2 log_map(const Point& p, const Point& q) const override;
  std::optional<double> ball_boundary_curvature(const Point& center, double r) const override;
  double fan_triangle_area(const Point& a, const Point& b) const override;
  double edge_length(const Point& a, const Point& b) const override;
  std::pair<Vec2, Vec2> edge_length_gradient(const Point& a, const Point& b) const override;

 protected:
  std::optional<double> closed_distance(const Point& p, const Point& q) const override;
  std::optional<BallMeasures> closed_ball(const Point& center, double r) const override;
  bool at_apex(const Point& x) const { return x.norm() < 1e-14; }

  std::shared_ptr<const WarpProfile> profile_;
};

/// Round sphere of curvature K in normal coordinates at the north pole; the
/// south pole is the chart circle |x| = pi/sqrt(K).
class SphereSurface final : public WarpedSurface {
 public:
  explicit SphereSurface(double curvature = 1.0, GeodesicOptions opts = {});

  BackendKind kind() const override { return BackendKind::Sphere; }
  std::string name() const override { return "sphere"; }
  bool in_chart(const Point& x) const override { return x.allFinite() && x.norm() <= M_PI / k_ * (1.0 + 1e-9); }
  Vec2 log_map(const Point& p, const Point& q) const override;
  std::optional<double> ball_boundary_curvature(const Point& center, double r) const override;
  double edge_length(const Point& a, const Point& b) const override;
  std::pair<Vec2, Vec2> edge_length_gradient(const Point& a, const Point& b) const override;
  std::optional<Point3> embed(const Point& x) const override;

 protected:
  std::optional<double> closed_distance(const Point& p, const Point& q) const override;
  std::optional<BallMeasures> closed_ball(const Point& center, double r) const override;

 private:
  // Unit-sphere embedding and its chart Jacobian.
  Point3 unit_embed(const Point& x) const;
  Eigen::Matrix<double, 3, 2> unit_embed_jacobian(const Point& x) const;
  double k_;
};

/// Helicoid (s cos v, s sin v, v) with chart (s, v): g = diag(1, 1 + s^2).
class HelicoidSurface final : public ManifoldBackend {
 public:
  using ManifoldBackend::ManifoldBackend;
  BackendKind kind() const override { return BackendKind::EmbeddedSurface; }
  std::string name() const override { return "helicoid"; }
  CurvatureSign curvature_sign() const override { return CurvatureSign::NonPositive; }
  nlohmann::json descriptor() const override { return {{"kind", "helicoid"}}; }
  bool in_chart(const Point& x) const override { return x.allFinite(); }
  Mat2 metric(const Point& x) const override;
  Christoffel christoffel(const Point& x) const override;
  double gaussian_curvature(const Point& x) const override;
  double area_density(const Point& x) const override;
  std::optional<Point3> embed(const Point& x) const override;
};

/// Catenoid (cosh t cos th, cosh t sin th, t) with chart (t, th): g = cosh^2 t I.
class CatenoidSurface final : public ManifoldBackend {
 public:
  using ManifoldBackend::ManifoldBackend;
  BackendKind kind() const override { return BackendKind::EmbeddedSurface; }
  std::string name() const override { return "catenoid"; }
  CurvatureSign curvature_sign() const override { return CurvatureSign::NonPositive; }
  nlohmann::json descriptor() const override { return {{"kind", "catenoid"}}; }
  bool in_chart(const Point& x) const override { return x.allFinite() && std::abs(x.x()) < 30.0; }
  Mat2 metric(const Point& x) const override;
  Christoffel christoffel(const Point& x) const override;
  double gaussian_curvature(const Point& x) const override;
  double area_density(const Point& x) const override;
  Vec2 log_map(const Point& p, const Point& q) const override;
  std::optional<Point3> embed(const Point& x) const override;
};

/// Builds a backend from {"kind": ...} plus kind-specific keys; unknown keys
/// raise ConfigInvalid naming the key. `base_dir` resolves tabulated CSV paths.
BackendPtr make_backend(const nlohmann::json& descriptor, const std::string& base_dir = ".",
                        GeodesicOptions opts = {});

/// Samples K on a chart grid of radius `extent` about the apex and checks the
/// samples against the declared sign.
bool validate_curvature_sign(const ManifoldBackend& m, double extent, int samples = 41, double slack = 1e-12);

/// Largest metric-entry deviation from the flat cone dr^2 + (c r)^2 dtheta^2
/// with c = phi'(d), measured at distance d from the apex (C0 convergence shadow).
double cone_deviation(const WarpProfile& profile, double d);

}  // namespace isodiam
