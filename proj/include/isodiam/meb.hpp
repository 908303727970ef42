#pragma once

#include "isodiam/geometry.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace isodiam {

class Region;

struct EnclosingBall {
  Eigen::VectorXd center;
  double radius = 0.0;
  std::vector<int> attainment;  // indices at distance >= radius - attain_tol

  Point center2() const { return center.head<2>(); }
  nlohmann::json to_json() const;
};

/// Relative attainment tolerance: attain_tol = kAttainRel * radius.
inline constexpr double kAttainRel = 1e-6;

/// Exact smallest enclosing ball of points in R^2 or R^3 (move-to-front Welzl,
/// brute force below 16 points). Deterministic in `seed`.
EnclosingBall welzl(const std::vector<Point>& points, std::uint64_t seed = 0);
EnclosingBall welzl(const std::vector<Point3>& points, std::uint64_t seed = 0);

struct OneCenterOptions {
  int stages = 6;                // beta doubles each stage
  double beta_scale = 32.0;      // beta_0 = beta_scale / diameter estimate
  int descent_iterations = 200;  // per stage
  int polish_iterations = 50;
  double polish_tol = 1e-13;
  std::uint64_t seed = 0;
};

/// Minimax centre of chart points under the backend's distance: annealed
/// log-sum-exp descent, then a tangent-space polish (Euclidean smallest ball
/// of the log-mapped points, recentred until the step vanishes).
EnclosingBall geodesic_one_center(const std::vector<Point>& points, const ManifoldBackend& m,
                                  const OneCenterOptions& opts = {},
                                  const std::optional<Point>& warm_start = std::nullopt);

struct RadiusResult {
  EnclosingBall ball;
  std::optional<EnclosingBall> ambient;  // embedded surfaces: ball in R^3
};

RadiusResult rad(const Region& region, const OneCenterOptions& opts = {},
                 const std::optional<Point>& warm_start = std::nullopt);

}  // namespace isodiam
