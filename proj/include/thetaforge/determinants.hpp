#pragma once

#include <vector>

#include <Eigen/Dense>

#include "thetaforge/characteristic.hpp"
#include "thetaforge/period_matrix.hpp"

namespace thetaforge {

/// A complex number held as exp(log_scale) * mantissa.
struct ScaledComplex {
  cplx log_scale;
  cplx mantissa;

  cplx value() const { return std::exp(log_scale) * mantissa; }
  /// Complex logarithm (branch not normalized).
  cplx log() const { return log_scale + std::log(mantissa); }
  double log_abs() const { return log_scale.real() + std::log(std::abs(mantissa)); }
};

/// Determinant by LU with partial pivoting.
cplx determinant(const Eigen::MatrixXcd& m);

/// det(theta_j(w_k)) for theta = theta[0].
cplx jacobian_points(const PeriodMatrix& tau, const std::vector<Eigen::VectorXcd>& w,
                     double eps);
ScaledComplex jacobian_points_scaled(const PeriodMatrix& tau,
                                     const std::vector<Eigen::VectorXcd>& w, double eps);

/// det(d theta[alpha_k] / dz_j (0)) using the representatives as given.
cplx jacobian_nullwerte(const PeriodMatrix& tau, const std::vector<Characteristic>& alphas,
                        double eps);

/// Bordered Hessian determinant det[[theta_jk, theta_j], [theta_k, 0]].
cplx eta_det(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps);
ScaledComplex eta_det_scaled(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps);

/// det(Y)^{(g+2)/4} exp(-pi sum_k y_k^T Y^{-1} y_k) |J(w_1..w_g)|, as a log.
double log_norm_J(const PeriodMatrix& tau, const std::vector<Eigen::VectorXcd>& w, double eps);
double norm_J(const PeriodMatrix& tau, const std::vector<Eigen::VectorXcd>& w, double eps);

/// det(Y)^{(g+5)/4} exp(-pi (g+1) y^T Y^{-1} y) |eta(z)|, as a log.
double log_norm_eta(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps);
double norm_eta(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps);

}  // namespace thetaforge
