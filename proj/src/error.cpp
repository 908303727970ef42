#include "isodiam/common.hpp"

namespace isodiam {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OutOfChart: return "OutOfChart";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::NotSimple: return "NotSimple";
    case ErrorCode::EmptyAttainment: return "EmptyAttainment";
    case ErrorCode::PatchUnavailable: return "PatchUnavailable";
    case ErrorCode::LineSearchFailed: return "LineSearchFailed";
    case ErrorCode::SelfIntersection: return "SelfIntersection";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::EmptyContactSet: return "EmptyContactSet";
    case ErrorCode::RootFindFailed: return "RootFindFailed";
    case ErrorCode::WrongBackend: return "WrongBackend";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace isodiam
