#pragma once

#include "isodiam/geometry.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace isodiam {

/// Closed counterclockwise polygon in the chart of a backend.
///
/// Measures are cached and dropped on every vertex update. Gradients are
/// covectors: the derivative along a per-vertex displacement X is
/// sum_i grad[i] . X[i] in chart coordinates.
class Region {
 public:
  Region(BackendPtr backend, std::vector<Point> vertices);

  const ManifoldBackend& backend() const { return *backend_; }
  const BackendPtr& backend_ptr() const { return backend_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point& operator[](std::size_t i) const { return vertices_[i]; }
  void set_vertices(std::vector<Point> vertices);

  double volume() const;
  double perimeter() const;
  std::vector<double> edge_lengths() const;  // edge i joins vertex i to i+1
  std::vector<double> dual_lengths() const;  // half the two adjacent edges
  std::vector<Vec2> volume_gradient() const;
  std::vector<Vec2> perimeter_gradient() const;
  /// Unit (in the metric) inward normals at the vertices, as chart vectors.
  std::vector<Vec2> inward_normals() const;
  /// Turning angle in a metric-orthonormal frame over the mean adjacent edge.
  std::vector<double> curvature() const;

  double signed_chart_area() const;
  bool is_simple() const;
  /// Throws NotSimple or DegeneratePolygon.
  void validate() const;

  nlohmann::json to_json() const;
  static Region from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  /// Per-vertex diagnostics: index, x, y, normal_x, normal_y, curvature.
  void write_csv(const std::filesystem::path& path) const;

 private:
  struct Cache {
    std::optional<double> volume, perimeter;
    std::optional<std::vector<double>> edges;
  };

  BackendPtr backend_;
  std::vector<Point> vertices_;
  mutable Cache cache_;
};

/// Polygon x(theta_i), theta_i = 2 pi i / n.
Region sample_curve(BackendPtr backend, const std::function<Point(double)>& curve, int n);
/// Chart ellipse with semi-axes a, b rotated by `angle`.
Region chart_ellipse(BackendPtr backend, const Point& center, double a, double b, int n, double angle = 0.0);
/// Vertices exp_center(r u_theta) for metric-unit directions u_theta.
Region metric_circle(BackendPtr backend, const Point& center, double r, int n);
/// Regular n-gon inscribed in the Euclidean circle of radius R.
Region regular_polygon(BackendPtr backend, const Point& center, double radius, int n);

struct LscReport {
  std::vector<double> radii;
  double limit_radius = 0.0;
  double tail_min = 0.0;
  bool holds = false;  // rad(limit) <= min over tail + tol
};

/// Radius lower-semicontinuity witness along a sequence converging to `limit`.
LscReport lower_semicontinuity_witness(const std::vector<Region>& sequence, const Region& limit, double tol,
                                       std::size_t tail = 3);

}  // namespace isodiam
