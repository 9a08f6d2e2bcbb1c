#include "thetaforge/period_matrix.hpp"

#include <cmath>

#include "thetaforge/error.hpp"

namespace thetaforge {

PeriodMatrix::PeriodMatrix(const Eigen::MatrixXcd& tau, double symmetry_tolerance) {
  if (tau.rows() == 0 || tau.rows() != tau.cols()) {
    throw Error(ErrorKind::invalid_period_matrix, "period matrix must be square and non-empty");
  }
  if (!tau.allFinite()) {
    throw Error(ErrorKind::invalid_period_matrix, "period matrix has non-finite entries");
  }
  const double asym = (tau - tau.transpose()).cwiseAbs().maxCoeff();
  if (asym > symmetry_tolerance) {
    throw Error(ErrorKind::invalid_period_matrix, "period matrix is not symmetric");
  }
  tau_ = 0.5 * (tau + tau.transpose());
  y_ = tau_.imag();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(y_, Eigen::EigenvaluesOnly);
  lambda_min_ = eig.eigenvalues().minCoeff();
  lambda_max_ = eig.eigenvalues().maxCoeff();
  if (!(lambda_min_ > 0)) {
    throw Error(ErrorKind::invalid_period_matrix,
                "imaginary part of the period matrix is not positive definite");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(y_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::invalid_period_matrix, "Cholesky factorization of Im(tau) failed");
  }
  upper_ = llt.matrixU();
  y_inv_ = llt.solve(Eigen::MatrixXd::Identity(genus(), genus()));
  y_inv_ = 0.5 * (y_inv_ + y_inv_.transpose()).eval();
  det_y_ = upper_.diagonal().prod();
  det_y_ *= det_y_;
}

LatticeReduction lattice_reduce(const PeriodMatrix& tau, const Eigen::VectorXcd& z) {
  if (z.size() != tau.genus()) {
    throw Error(ErrorKind::dimension_mismatch, "vector length does not match genus");
  }
  const Eigen::VectorXd w = tau.imag_inverse() * z.imag();
  Eigen::VectorXi m(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) m(i) = static_cast<int>(std::lround(w(i)));
  const Eigen::VectorXcd shifted = z - tau.tau() * m.cast<cplx>();
  Eigen::VectorXi n(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) n(i) = static_cast<int>(std::lround(shifted(i).real()));
  return {shifted - n.cast<cplx>(), m, n};
}

double lattice_distance(const PeriodMatrix& tau, const Eigen::VectorXcd& z) {
  return lattice_reduce(tau, z).reduced.cwiseAbs().maxCoeff();
}

Eigen::VectorXcd half_period(const PeriodMatrix& tau, const Eigen::VectorXd& top,
                             const Eigen::VectorXd& bottom) {
  return tau.tau() * top.cast<cplx>() + bottom.cast<cplx>();
}

}  // namespace thetaforge
