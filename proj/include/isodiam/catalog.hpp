#pragma once

#include "isodiam/common.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <vector>

namespace isodiam {

// Catenoid phi(t, theta) = (cosh t cos theta, cosh t sin theta, t), |t| <= T.
// |phi_t|^2 = |phi_theta|^2 = cosh^2 t and phi_t . phi_theta = 0, hence
//   area 2 pi (T + sinh T cosh T), boundary length 4 pi cosh T,
//   ambient radius sqrt(cosh^2 T + T^2) (both rims lie on that sphere about 0).
struct TruncatedCatenoid {
  double T;

  double area() const;
  double boundary_length() const;
  double ambient_radius() const;
  Point3 point(double t, double theta) const;
  Point3 dt(double t, double theta) const;  // outward conormal direction at t = T
};

/// Unique positive root of t = coth t.
double critical_catenoid_T0();
/// Root of coth t = 2 tanh 2t.
double critical_mobius_T0();
/// (2 sinh t cos th, 2 sinh t sin th, cosh 2t cos 2th, cosh 2t sin 2th).
Eigen::Vector4d mobius_point(double t, double theta);
Eigen::Vector4d mobius_dt(double t, double theta);

/// 2 area / (rad_R3 * boundary length) = (T + sinh T cosh T) / (cosh T sqrt(cosh^2 T + T^2)).
double minimal_ratio(double T);

struct MeshMeasures {
  double area = 0.0;            // quadrature of the surface element on the mesh nodes
  double boundary_length = 0.0; // chord lengths of the two rims
  double ambient_radius = 0.0;  // welzl on all mesh points
  Point3 center = Point3::Zero();
  double ratio = 0.0;
  double max_conormal_angle = 0.0;  // between conormal and x - center on the rims
};

/// `n_theta` samples around, `n_t` (even) intervals along the axis.
MeshMeasures catenoid_mesh(double T, int n_theta = 1024, int n_t = 64, std::uint64_t seed = 0);

/// Largest angle between the Mobius conormal and the radial direction on the rim t = T.
double mobius_conormal_angle(double T, int n_theta = 256);

struct DominanceReport {
  double intrinsic = 0.0;  // geodesic one-centre radius of a sample of the surface
  double ambient = 0.0;
  bool holds = false;
};

/// Intrinsic radius (lower bound from sampled rings) against the ambient radius.
DominanceReport intrinsic_dominance(double T, int rings = 3, int per_ring = 16);

struct DiskCheck {
  double ratio = 0.0;
  double expected = 0.0;
};

/// Regular N-gon of radius `r` about `center`: 2 area / (rad length).
DiskCheck equatorial_disk_check(int N = 4096, double r = 1.0, Point center = Point::Zero());
/// Disk minus a concentric hole of radius `a r`; closed form 1 - a.
DiskCheck annulus_check(double a, int N = 4096, double r = 1.0);

struct SweepRow {
  double T, rho, discrepancy;
};

/// n_theta = 0 skips the mesh and leaves every discrepancy at 0.
std::vector<SweepRow> ratio_sweep(double T_min, double T_max, int samples, int n_theta = 1024, int n_t = 64);

struct PeakReport {
  double T_max = 0.0;        // abscissa of the largest rho
  double rho_max = 0.0;
  int interior_maxima = 0;   // strict local maxima away from the ends
};

/// rho dips again past T ~ 2.3 before tending to 1, so the sweep is not
/// unimodal; a single interior peak at the global maximum is what holds.
PeakReport peaks(const std::vector<SweepRow>& rows);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

}  // namespace isodiam
