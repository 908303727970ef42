#pragma once

#include "isodiam/geometry.hpp"
#include "isodiam/obstacle.hpp"
#include "isodiam/region.hpp"
#include "isodiam/shapeopt.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace isodiam {

enum class Bound { AtLeastOne, AtMostOne, EqualOne };
std::string_view to_string(Bound b) noexcept;

/// Measured rad P / (2 V) against a bound on 1.
struct VerificationReport {
  std::string id;
  nlohmann::json backend;
  double V = 0.0, P = 0.0, rad = 0.0, ratio = 0.0;
  Bound bound = Bound::AtLeastOne;
  double margin = 0.0;  // signed distance to the bound, positive inside
  double tol = 0.0;
  bool pass = false;
  double refinement_delta = 0.0;  // |ratio(N) - ratio(2N)|
  std::optional<double> expected;  // closed-form comparator, when one exists
  std::string comparator;          // where `expected` comes from
  nlohmann::json details = nlohmann::json::object();

  /// Margin beyond three refinement deltas.
  bool strict() const { return margin > 3.0 * refinement_delta; }
  /// Sets margin and pass from ratio, bound and tol.
  void finalize();
  nlohmann::json to_json() const;
};

using RegionFamily = std::function<Region(int n)>;

/// Euclidean backend only; equality is flagged in details when |ratio - 1| <= tol.
/// The refinement delta of a single region comes from `subdivide`.
VerificationReport check_euclidean(const Region& region, double tol = 1e-6);
VerificationReport check_euclidean(const RegionFamily& family, int n, double tol = 1e-6);

/// Nonpositively curved backends; WrongBackend otherwise.
VerificationReport check_ch(const Region& region, double tol = 1e-6);
VerificationReport check_ch(const RegionFamily& family, int n, double tol = 1e-6);
/// Metric ball with rad = r, measured by closed form or geodesic fan.
VerificationReport check_ch_ball(const BackendPtr& m, const Point& center, double r, double tol = 1e-6);

/// Nonnegatively curved backends: r P(B_r) <= 2 V(B_r).
VerificationReport check_ricci_ball(const BackendPtr& m, const Point& center, double r, double tol = 1e-9);

/// Every edge split at its chart midpoint. Areas use chart-straight edges, so
/// the enclosed set is unchanged and only the perimeter model is refined.
Region subdivide(const Region& r);

/// Star-shaped polygon about `center` with n >= 4 vertices: one jittered angle
/// per sector of 2 pi / n, geodesic radii uniform in [r_min, r_max].
Region random_star_region(const BackendPtr& m, const Point& center, int n, double r_min, double r_max,
                          std::uint64_t seed);

enum class ScanExpectation { Decreasing, ApexMinimum, Constant, AboveOnly };
std::string_view to_string(ScanExpectation e) noexcept;

/// Decreasing on warped surfaces with negative curvature and monotone phi'
/// and on the helicoid; apex minimum on nonnegatively curved warped surfaces;
/// constant on flat backends; otherwise only f > 2V.
ScanExpectation default_expectation(const ManifoldBackend& m);

struct ScanRow {
  double d = 0.0;  // chart distance of the centre from the apex
  Point center = Point::Zero();
  double r = 0.0;
  double P = 0.0;
  double f = 0.0;       // r P at volume V
  double excess = 0.0;  // f / (2V) - 1
};

struct ScanReport {
  nlohmann::json backend;
  double V = 0.0;
  ScanExpectation expectation = ScanExpectation::AboveOnly;
  std::vector<ScanRow> rows;
  bool strictly_decreasing = false;
  bool all_above = false;  // f > 2V at every sampled centre
  bool apex_beats_far = false;
  double max_abs_excess = 0.0;
  double final_gap = 0.0;  // f / (2V) - 1 at the last centre
  bool pass = false;
  nlohmann::json to_json() const;
};

inline constexpr double kHelicoidScanCap = 12.0;

struct ScanOptions {
  FanOptions fan{512, 256};
  double constant_tol = 1e-9;  // Constant expectation: |excess| bound
  std::optional<ScanExpectation> expectation;
};

/// Metric balls of volume V at the given centres (root of r -> Vol(B_r(c))).
/// Throws RootFindFailed when the volume cannot be bracketed.
ScanReport infimum_scan(const BackendPtr& m, double V, const std::vector<Point>& centers,
                        const ScanOptions& opts = {});
void write_scan_csv(const ScanReport& rep, const std::filesystem::path& path);

/// Circle of radius rho whose centre lies at distance c from the centre of
/// the container disk, intersected with the container.
struct Lens {
  double c = 0.0, rho = 0.0, area = 0.0, perimeter = 0.0;
};

Lens lens_measures(double R, double c, double rho);
/// Brute-force least perimeter over the two-parameter lens family at area V.
Lens best_lens(double R, double V, int samples = 400);

struct ConstrainedOptions {
  int vertices = 256;
  ShapeParams shape;
  double contact_tol = 1e-6;
  double curvature_tol = 1e-3;  // interior curvature standard deviation bound
  double perimeter_tol = 2e-3;  // relative gap to the lens oracle
  int obstacle_cells = 64;
  double obstacle_radius = 0.2;
};

struct ConstrainedReport {
  VerificationReport report;  // ratio = P / P_oracle, bound = 1
  MinimizeResult run;
  Lens oracle;
  double contact_fraction = 0.0;  // share of boundary length on the container circle
  int contact_vertices = 0;
  double interior_curvature_mean = 0.0;
  double interior_curvature_std = 0.0;
  std::optional<ObstacleSolution> obstacle;  // graph of the lowest boundary arc over the container
};

/// Least perimeter at volume V inside a Euclidean container disk, started from
/// a chart ellipse; the graph of the optimum below its lowest point is then
/// solved as an obstacle problem over the container's cap. Euclidean only.
ConstrainedReport constrained_run(const BackendPtr& m, double V, const Container& ball,
                                  const ConstrainedOptions& opts = {});

}  // namespace isodiam
