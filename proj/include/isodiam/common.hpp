#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace isodiam {

using Point = Eigen::Vector2d;   // chart coordinates
using Vec2 = Eigen::Vector2d;    // chart tangent vector or covector
using Mat2 = Eigen::Matrix2d;
using Point3 = Eigen::Vector3d;

enum class ErrorCode {
  NoConvergence,
  OutOfChart,
  DegeneratePolygon,
  NotSimple,
  EmptyAttainment,
  PatchUnavailable,
  LineSearchFailed,
  SelfIntersection,
  SingularMetric,
  EmptyContactSet,
  RootFindFailed,
  WrongBackend,
  ConfigInvalid,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Rotation by -90 degrees: outward normal of a counterclockwise edge direction.
inline Vec2 rot_cw(const Vec2& v) { return {v.y(), -v.x()}; }

// Rotation by +90 degrees.
inline Vec2 rot_ccw(const Vec2& v) { return {-v.y(), v.x()}; }

}  // namespace isodiam
