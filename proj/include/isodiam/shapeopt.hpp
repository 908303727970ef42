#pragma once

#include "isodiam/meb.hpp"
#include "isodiam/region.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace isodiam {

/// Fixed enclosing disk for perimeter minimisation with rad frozen.
struct Container {
  Point center = Point::Zero();
  double radius = 1.0;
};

struct ShapeParams {
  double vol_tol = 1e-8;
  int max_iterations = 2000;
  double stall_rel = 1e-8;  // relative decrease over `stall_window` iterations
  int stall_window = 20;
  double min_step = 1e-14;
  int max_rejections = 100;
  int redistribute_every = 25;
  double patch_fraction = 0.25;
  double patch_factor = 2.0;
  double sobolev_length = 0.25;  // smoothing length in units of the volume radius
  double max_displacement = 0.05;  // first trial step, in units of the volume radius
  std::optional<Container> container;
  OneCenterOptions meb;
};

struct ShapeState {
  Region region;
  EnclosingBall ball;
  double multiplier_H0 = 0.0;
  double target_volume = 0.0;
  double functional_value = 0.0;
  std::vector<int> previous_attainment;

  double ratio() const { return functional_value / (2.0 * region.volume()); }
};

ShapeState make_state(Region region, double target_volume, const ShapeParams& params = {});

/// rad(E) P(E), recomputed from scratch; refreshes the ball.
double evaluate(ShapeState& s, const ShapeParams& params = {});

std::vector<Vec2> perimeter_gradient(const ShapeState& s);
std::vector<Vec2> volume_gradient(const ShapeState& s);
/// Mean of the outward radial covectors over the attainment set (plus the
/// previous iteration's set when given).
std::vector<Vec2> radius_subgradient(const ShapeState& s, bool include_previous = false);

/// Least-squares H0 in grad_P ~ H0 grad_V over the given vertices (all if empty).
double estimate_H0(const Region& r, const std::vector<int>& subset = {});

struct ProjectionReport {
  double deficit = 0.0;             // target - volume before projection
  double perimeter_change = 0.0;
  double C1 = 0.0;                  // (max |curvature| + 1) * patch_factor
  bool bound_holds = true;          // perimeter_change <= C1 |deficit|
  bool used_patch = true;
  int newton_iterations = 0;
};

/// Restores the target volume by a uniform normal displacement on a 25% arc
/// away from the attainment set (whole boundary if every arc touches it).
ProjectionReport project_volume(ShapeState& s, const ShapeParams& params = {});

enum class Termination { Converged, Budget, LineSearchFailed };
std::string_view to_string(Termination t) noexcept;

struct TraceRow {
  int iteration = 0;
  double functional = 0.0, ratio = 0.0, rad = 0.0, P = 0.0, V = 0.0, H0 = 0.0, step = 0.0;
  int rejected_steps = 0;
};

struct MinimizeResult {
  ShapeState state;
  std::vector<TraceRow> trace;
  Termination termination = Termination::Budget;
  bool monotone = true;
  double max_projection_C1 = 0.0;
  bool projection_bound_holds = true;
};

MinimizeResult minimize(double V, Region init, const ShapeParams& params = {});

void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path);

/// Metric-arclength resampling to `n` vertices.
Region redistribute(const Region& r, int n);

struct CurvatureBoundReport {
  int contact_vertices = 0;
  double H0 = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;
  double max_violation = 0.0;      // worst excess over the bounds
  double off_contact_variance = 0.0;
  bool pass = false;
};

/// On contact vertices eta - eps <= k <= H0 + eps; elsewhere |k - H0| <= eps.
CurvatureBoundReport curvature_bound_check(const ShapeState& s, double ball_curvature, double epsilon,
                                           double contact_tol);

}  // namespace isodiam
