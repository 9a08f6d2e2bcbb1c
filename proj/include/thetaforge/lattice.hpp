#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace thetaforge {

/// Visits every integer vector n with ||U (n + c)||_2 <= radius, where U is
/// upper triangular with positive diagonal. Coordinates are fixed from the
/// last one down (Fincke-Pohst order). The visitor receives n as doubles.
template <class Visitor>
void enumerate_ellipsoid(const Eigen::MatrixXd& upper, const Eigen::VectorXd& center,
                         double radius, Visitor&& visit) {
  const int g = static_cast<int>(upper.rows());
  Eigen::VectorXd n(g);
  std::vector<double> remaining(g + 1);
  remaining[g] = radius * radius * (1.0 + 1e-12);

  auto level = [&](auto&& self, int i) -> void {
    double t = 0;
    for (int j = i + 1; j < g; ++j) t += upper(i, j) * (n(j) + center(j));
    const double r2 = remaining[i + 1];
    if (r2 < 0) return;
    const double r = std::sqrt(r2);
    const double u = upper(i, i);
    const double lo = std::ceil((-r - t) / u - center(i));
    const double hi = std::floor((r - t) / u - center(i));
    for (double k = lo; k <= hi; k += 1.0) {
      n(i) = k;
      const double comp = u * (k + center(i)) + t;
      remaining[i] = r2 - comp * comp;
      if (i == 0) {
        visit(static_cast<const Eigen::VectorXd&>(n));
      } else {
        self(self, i - 1);
      }
    }
  };
  level(level, g - 1);
}

}  // namespace thetaforge
