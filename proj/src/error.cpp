#include "thetaforge/error.hpp"

namespace thetaforge {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_characteristic: return "invalid-characteristic";
    case ErrorKind::invalid_tolerance: return "invalid-tolerance";
    case ErrorKind::invalid_period_matrix: return "invalid-period-matrix";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::duplicate_branch_point: return "duplicate-branch-point";
    case ErrorKind::wrong_degree: return "wrong-degree";
    case ErrorKind::path_failure: return "path-failure";
    case ErrorKind::generic_position: return "generic-position";
    case ErrorKind::numeric_failure: return "numeric-failure";
  }
  return "unknown";
}

}  // namespace thetaforge
