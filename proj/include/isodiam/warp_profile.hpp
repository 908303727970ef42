#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <vector>

namespace isodiam {

enum class CurvatureSign { NonPositive, NonNegative, Mixed };

std::string_view to_string(CurvatureSign sign) noexcept;

/// Radial profile phi of a warped metric dr^2 + phi(r)^2 dtheta^2.
///
/// Gauss curvature of the warped surface is K = -phi''/phi. Implementations
/// supply the cancellation-prone quantities (r - phi, 1 - phi') directly so
/// that the apex neighbourhood is evaluated to full relative precision.
class WarpProfile {
 public:
  virtual ~WarpProfile() = default;

  virtual double value(double r) const = 0;
  virtual double slope(double r) const = 0;
  virtual double second(double r) const = 0;

  /// r - phi(r).
  virtual double deficit(double r) const { return r - value(r); }
  /// 1 - phi'(r).
  virtual double slope_deficit(double r) const { return 1.0 - slope(r); }
  /// Integral of phi over [0, r].
  virtual double integral(double r) const = 0;
  /// -phi''(r)/phi(r), with the apex limit at r = 0.
  virtual double gaussian_curvature(double r) const = 0;

  virtual CurvatureSign declared_sign() const = 0;
  virtual bool is_flat() const { return false; }
  /// Largest radius on which the profile is defined.
  virtual double max_radius() const { return 1e6; }

  virtual nlohmann::json descriptor() const = 0;
};

/// phi_a(r) = a r + (1 - a) tanh r.
class TanhProfile final : public WarpProfile {
 public:
  explicit TanhProfile(double a);

  double a() const { return a_; }

  double value(double r) const override;
  double slope(double r) const override;
  double second(double r) const override;
  double deficit(double r) const override;
  double slope_deficit(double r) const override;
  double integral(double r) const override;
  double gaussian_curvature(double r) const override;
  CurvatureSign declared_sign() const override;
  bool is_flat() const override { return a_ == 1.0; }
  nlohmann::json descriptor() const override;

 private:
  double a_;
};

/// phi(r) = sin(sqrt(K) r)/sqrt(K): the round sphere of curvature K in
/// geodesic polar coordinates about a pole.
class SineProfile final : public WarpProfile {
 public:
  explicit SineProfile(double curvature);

  double curvature() const { return k_ * k_; }

  double value(double r) const override;
  double slope(double r) const override;
  double second(double r) const override;
  double deficit(double r) const override;
  double slope_deficit(double r) const override;
  double integral(double r) const override;
  double gaussian_curvature(double r) const override;
  CurvatureSign declared_sign() const override { return CurvatureSign::NonNegative; }
  double max_radius() const override;
  nlohmann::json descriptor() const override;

 private:
  double k_;
};

/// Clamped cubic spline through tabulated (r, phi) samples with phi'(0) = 1.
class TabulatedProfile final : public WarpProfile {
 public:
  TabulatedProfile(std::vector<double> r, std::vector<double> phi);

  /// Two-column CSV (r, phi); optional header line; r strictly increasing from 0.
  static TabulatedProfile from_csv(const std::filesystem::path& path);

  double value(double r) const override;
  double slope(double r) const override;
  double second(double r) const override;
  double integral(double r) const override;
  double gaussian_curvature(double r) const override;
  CurvatureSign declared_sign() const override { return sign_; }
  double max_radius() const override { return r_.back(); }
  nlohmann::json descriptor() const override;

 private:
  std::size_t segment(double r) const;

  std::vector<double> r_, phi_, m_;  // m_: second derivatives at knots
  std::vector<double> cumulative_;   // integral of phi up to each knot
  CurvatureSign sign_;
};

/// Samples -phi''/phi on [0, r_max] and reports whether the samples agree
/// with the declared sign (zero tolerance `slack`).
bool curvature_sign_consistent(const WarpProfile& profile, double r_max, int samples = 2001,
                               double slack = 1e-12);

}  // namespace isodiam
