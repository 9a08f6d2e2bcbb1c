#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "thetaforge/characteristic.hpp"
#include "thetaforge/period_matrix.hpp"

namespace thetaforge {

/// Smallest tolerance accepted by the evaluation routines.
inline constexpr double min_tolerance = 1e-13;

struct ThetaValue {
  cplx value;
  double error_bound = 0;  ///< certified bound on the truncation error
};

/// Value, gradient and Hessian of theta[alpha] at one point, from a single
/// lattice enumeration. Entries above the requested order are left empty.
struct ThetaJet {
  int order = 0;
  cplx value;
  Eigen::VectorXcd gradient;
  Eigen::MatrixXcd hessian;
  double value_error = 0;
  double gradient_error = 0;  ///< per component
  double hessian_error = 0;   ///< per entry
  std::size_t lattice_points = 0;
};

/// Upper bound on the absolute contribution of all lattice points with
/// ||U(n + c)|| > radius to the order-th derivative series, for a point with
/// imaginary part y_shift. Requires radius >= sqrt(lambda_min(Y)).
double tail_bound(const PeriodMatrix& tau, const Eigen::VectorXd& y_shift, double radius,
                  int order);

/// Smallest radius (to bisection precision) whose tail bound is <= eps.
/// The order-2 radius also certifies orders 0 and 1.
double truncation_radius(const PeriodMatrix& tau, const Eigen::VectorXd& y_shift, double eps,
                         int order);

ThetaJet theta_jet(const PeriodMatrix& tau, const Characteristic& alpha,
                   const Eigen::VectorXcd& z, double eps, int order);

ThetaValue theta(const PeriodMatrix& tau, const Characteristic& alpha, const Eigen::VectorXcd& z,
                 double eps);

std::vector<ThetaValue> theta_grad(const PeriodMatrix& tau, const Characteristic& alpha,
                                   const Eigen::VectorXcd& z, double eps);

/// Symmetric g x g matrix stored once per unordered pair, so (j,k) and
/// (k,j) are the same object.
class SymmetricThetaMatrix {
 public:
  SymmetricThetaMatrix() = default;
  explicit SymmetricThetaMatrix(int g) : g_(g), packed_(static_cast<std::size_t>(g * (g + 1) / 2)) {}

  int size() const noexcept { return g_; }
  const ThetaValue& operator()(int j, int k) const { return packed_.at(index(j, k)); }
  ThetaValue& operator()(int j, int k) { return packed_.at(index(j, k)); }
  Eigen::MatrixXcd values() const;

 private:
  std::size_t index(int j, int k) const {
    if (j > k) std::swap(j, k);
    return static_cast<std::size_t>(k * (k + 1) / 2 + j);
  }
  int g_ = 0;
  std::vector<ThetaValue> packed_;
};

SymmetricThetaMatrix theta_hess(const PeriodMatrix& tau, const Characteristic& alpha,
                                const Eigen::VectorXcd& z, double eps);

/// theta[alpha] and its derivatives at z written as exp(log_factor) * jet,
/// where jet is evaluated at the lattice-reduced point and already carries
/// the chain-rule terms of the quasi-periodicity factor. Keeps magnitudes
/// representable when z is far from the fundamental cell.
struct ScaledThetaJet {
  cplx log_factor;
  ThetaJet jet;
  LatticeReduction reduction;
};

ScaledThetaJet theta_jet_scaled(const PeriodMatrix& tau, const Characteristic& alpha,
                                const Eigen::VectorXcd& z, double eps, int order);

/// log of det(Y)^{1/4} exp(-pi y^T Y^{-1} y) |theta(z)|; -inf on exact zeros.
double log_norm_theta(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps);
double norm_theta(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps);

/// Throws invalid_tolerance unless eps is finite and >= min_tolerance.
void check_tolerance(double eps);

}  // namespace thetaforge
