#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "thetaforge/period_matrix.hpp"

namespace thetaforge {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verification_failed = 1;
inline constexpr int usage = 2;
inline constexpr int numeric = 3;
}  // namespace exit_code

/// Runs the command line; args excludes the program name.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "0.5+1i", "1i", "-2", "3-0.25i".
cplx parse_complex(const std::string& text);
/// Entries separated by ',', rows by ';'.
Eigen::MatrixXcd parse_complex_matrix(const std::string& text);
Eigen::VectorXcd parse_complex_vector(const std::string& text);

}  // namespace thetaforge
