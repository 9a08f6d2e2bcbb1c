#pragma once

#include <stdexcept>
#include <string>

namespace thetaforge {

enum class ErrorKind {
  invalid_characteristic,
  invalid_tolerance,
  invalid_period_matrix,
  dimension_mismatch,
  invalid_argument,
  duplicate_branch_point,
  wrong_degree,
  path_failure,
  generic_position,
  numeric_failure,
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-readable kind; the CLI maps kinds to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace thetaforge
