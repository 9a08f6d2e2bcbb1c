#include "thetaforge/determinants.hpp"

#include <cmath>
#include <numbers>

#include "thetaforge/error.hpp"
#include "thetaforge/theta.hpp"

namespace thetaforge {

namespace {

void check_count(const PeriodMatrix& tau, std::size_t count) {
  if (count != static_cast<std::size_t>(tau.genus())) {
    throw Error(ErrorKind::dimension_mismatch, "expected exactly g arguments");
  }
}

double quad_form(const PeriodMatrix& tau, const Eigen::VectorXcd& w) {
  const Eigen::VectorXd y = w.imag();
  return y.dot(tau.imag_inverse() * y);
}

Eigen::MatrixXcd bordered(const Eigen::MatrixXcd& hess, const Eigen::VectorXcd& grad) {
  const Eigen::Index g = grad.size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(g + 1, g + 1);
  m.topLeftCorner(g, g) = hess;
  m.topRightCorner(g, 1) = grad;
  m.bottomLeftCorner(1, g) = grad.transpose();
  return m;
}

}  // namespace

cplx determinant(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::dimension_mismatch, "matrix is not square");
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

cplx jacobian_points(const PeriodMatrix& tau, const std::vector<Eigen::VectorXcd>& w,
                     double eps) {
  check_count(tau, w.size());
  const int g = tau.genus();
  const auto zero = Characteristic::zero(g);
  Eigen::MatrixXcd m(g, g);
  for (int k = 0; k < g; ++k) m.col(k) = theta_jet(tau, zero, w[k], eps, 1).gradient;
  return determinant(m);
}

ScaledComplex jacobian_points_scaled(const PeriodMatrix& tau,
                                     const std::vector<Eigen::VectorXcd>& w, double eps) {
  check_count(tau, w.size());
  const int g = tau.genus();
  const auto zero = Characteristic::zero(g);
  Eigen::MatrixXcd m(g, g);
  cplx log_scale = 0;
  for (int k = 0; k < g; ++k) {
    const auto sj = theta_jet_scaled(tau, zero, w[k], eps, 1);
    m.col(k) = sj.jet.gradient;
    log_scale += sj.log_factor;
  }
  return {log_scale, determinant(m)};
}

cplx jacobian_nullwerte(const PeriodMatrix& tau, const std::vector<Characteristic>& alphas,
                        double eps) {
  check_count(tau, alphas.size());
  const int g = tau.genus();
  const Eigen::VectorXcd origin = Eigen::VectorXcd::Zero(g);
  Eigen::MatrixXcd m(g, g);
  for (int k = 0; k < g; ++k) m.col(k) = theta_jet(tau, alphas[k], origin, eps, 1).gradient;
  return determinant(m);
}

cplx eta_det(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps) {
  const auto jet = theta_jet(tau, Characteristic::zero(tau.genus()), z, eps, 2);
  return determinant(bordered(jet.hessian, jet.gradient));
}

ScaledComplex eta_det_scaled(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps) {
  const int g = tau.genus();
  const auto sj = theta_jet_scaled(tau, Characteristic::zero(g), z, eps, 2);
  return {static_cast<double>(g + 1) * sj.log_factor,
          determinant(bordered(sj.jet.hessian, sj.jet.gradient))};
}

double log_norm_J(const PeriodMatrix& tau, const std::vector<Eigen::VectorXcd>& w, double eps) {
  const int g = tau.genus();
  const auto j = jacobian_points_scaled(tau, w, eps);
  double quad = 0;
  for (const auto& wk : w) quad += quad_form(tau, wk);
  return 0.25 * (g + 2) * std::log(tau.det_imag()) - std::numbers::pi * quad + j.log_abs();
}

double norm_J(const PeriodMatrix& tau, const std::vector<Eigen::VectorXcd>& w, double eps) {
  return std::exp(log_norm_J(tau, w, eps));
}

double log_norm_eta(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps) {
  const int g = tau.genus();
  const auto e = eta_det_scaled(tau, z, eps);
  return 0.25 * (g + 5) * std::log(tau.det_imag()) -
         std::numbers::pi * (g + 1) * quad_form(tau, z) + e.log_abs();
}

double norm_eta(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps) {
  return std::exp(log_norm_eta(tau, z, eps));
}

}  // namespace thetaforge
