#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "thetaforge/characteristic.hpp"
#include "thetaforge/charsys.hpp"
#include "thetaforge/period_matrix.hpp"
#include "thetaforge/rng.hpp"

namespace thetaforge {

/// y^2 = prod (x - a_i) with 2g+2 real branch points a_1 < ... < a_{2g+2}.
class HyperellipticCurve {
 public:
  explicit HyperellipticCurve(std::vector<double> points);

  int genus() const noexcept { return static_cast<int>(a_.size()) / 2 - 1; }
  const std::vector<double>& branch_points() const noexcept { return a_; }
  double branch_point(int k) const { return a_.at(k - 1); }  ///< 1-based
  double span() const noexcept { return a_.back() - a_.front(); }
  double min_gap() const noexcept;
  /// Distance from x to the nearest branch point.
  double branch_distance(cplx x) const noexcept;
  /// Index (1-based) of a branch point within 1e-14 * span of x, or 0.
  int branch_index(cplx x) const noexcept;

 private:
  std::vector<double> a_;
};

/// Sorts and validates; throws wrong_degree or duplicate_branch_point.
HyperellipticCurve new_curve(std::vector<double> points);

/// Sorted points in [-2, 2] with consecutive gaps >= min_gap.
HyperellipticCurve random_curve(int genus, std::uint64_t seed, double min_gap = 0.1);

/// y_1(x) = prod of principal square roots of (x - a_i).
cplx principal_y(const HyperellipticCurve& curve, cplx x);

/// Finite point; y = sheet * principal_y(x).
struct SurfacePoint {
  cplx x;
  int sheet = 1;

  SurfacePoint involution() const { return {x, -sheet}; }
};

SurfacePoint weierstrass_point(const HyperellipticCurve& curve, int k);

struct Divisor {
  std::vector<std::pair<SurfacePoint, int>> terms;

  Divisor& add(const SurfacePoint& p, int weight) {
    terms.emplace_back(p, weight);
    return *this;
  }
  int degree() const;
};

/// Periods of x^{j-1} dx / y over the cycles, the normalized period matrix
/// and the Abel-Jacobi calibration data.
struct PeriodData {
  Eigen::MatrixXcd a_periods;     ///< (j, k): integral of x^j dx/y over A_k
  Eigen::MatrixXcd b_periods;     ///< (j, k): integral of x^j dx/y over B_k
  PeriodMatrix tau;
  Eigen::MatrixXcd basis_change;  ///< C with C * a_periods = I; v = C * omega
  int b_orientation = 1;          ///< -1 when the B-cycles were reversed
  /// integral of omega over [a_l, a_{l+1}] on the upper edge, l = 0..2g
  std::vector<Eigen::VectorXcd> segment_integrals;
  Eigen::VectorXcd riemann_shift;  ///< Delta
  double eps = 0;
};

/// Computes periods with node doubling until every segment integral is
/// stable to eps, then calibrates Delta.
PeriodData periods(const HyperellipticCurve& curve, double eps);

/// Rebuilds segment integrals from the periods (inverse of the cycle sums).
std::vector<Eigen::VectorXcd> segment_integrals_from_periods(const Eigen::MatrixXcd& a_periods,
                                                             const Eigen::MatrixXcd& b_periods,
                                                             int b_orientation);

/// Assembles PeriodData from stored A, tau and Delta (cache path).
PeriodData period_data_from(const HyperellipticCurve& curve, const Eigen::MatrixXcd& a_periods,
                            const Eigen::MatrixXcd& tau, int b_orientation,
                            const Eigen::VectorXcd& riemann_shift, double eps);

/// Abel-Jacobi image of W_k relative to W_{2g+2}.
Eigen::VectorXcd weierstrass_image(const PeriodData& pd, int k);

/// Integral of v from W_b to P along the default polyline.
Eigen::VectorXcd abel_jacobi(const HyperellipticCurve& curve, const PeriodData& pd,
                             const SurfacePoint& p, int base_index, double eps);

/// Same, but the path runs through the given waypoints after leaving the
/// start segment. Throws path_failure if the route comes too close to a
/// branch point.
Eigen::VectorXcd abel_jacobi_via(const HyperellipticCurve& curve, const PeriodData& pd,
                                 const SurfacePoint& p, int base_index,
                                 const std::vector<cplx>& waypoints, double eps);

/// phi(D) = sum w * AJ(p) + Delta with base W_{2g+2}; requires deg D = g-1.
Eigen::VectorXcd divisor_class(const HyperellipticCurve& curve, const PeriodData& pd,
                               const Divisor& d, double eps);

/// eta_{T o U} for |T| in {g-1, g+1}.
Characteristic weierstrass_class(int genus, const IndexSet& t);

struct SamplingRegion {
  /// Rectangle in the x-plane in units of the curve span, relative to the
  /// branch point interval.
  double margin = 0.25;
  double height = 0.5;
  double exclusion = 1e-3;  ///< minimum distance to branch points / span
};

SurfacePoint random_point(const HyperellipticCurve& curve, Rng& rng,
                          const SamplingRegion& region = {});
SurfacePoint random_point(const HyperellipticCurve& curve, std::uint64_t seed,
                          const SamplingRegion& region = {});

}  // namespace thetaforge
