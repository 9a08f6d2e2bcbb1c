#pragma once

#include <complex>

#include <Eigen/Dense>

namespace thetaforge {

using cplx = std::complex<double>;

/// Element of the Siegel upper half space: complex symmetric g x g matrix
/// whose imaginary part Y is positive definite.
///
/// Construction validates both conditions, symmetrizes the input, and caches
/// the factorizations every theta evaluation needs (Y^{-1}, the upper
/// Cholesky factor U with U^T U = Y, extreme eigenvalues, det Y).
class PeriodMatrix {
 public:
  static constexpr double default_symmetry_tolerance = 1e-9;

  explicit PeriodMatrix(const Eigen::MatrixXcd& tau,
                        double symmetry_tolerance = default_symmetry_tolerance);

  int genus() const noexcept { return static_cast<int>(tau_.rows()); }
  const Eigen::MatrixXcd& tau() const noexcept { return tau_; }
  const Eigen::MatrixXd& imag() const noexcept { return y_; }
  const Eigen::MatrixXd& imag_inverse() const noexcept { return y_inv_; }
  const Eigen::MatrixXd& cholesky_upper() const noexcept { return upper_; }
  double min_eigenvalue() const noexcept { return lambda_min_; }
  double max_eigenvalue() const noexcept { return lambda_max_; }
  double det_imag() const noexcept { return det_y_; }

 private:
  Eigen::MatrixXcd tau_;
  Eigen::MatrixXd y_;
  Eigen::MatrixXd y_inv_;
  Eigen::MatrixXd upper_;
  double lambda_min_ = 0;
  double lambda_max_ = 0;
  double det_y_ = 0;
};

/// z = reduced + tau * m + n with integer m, n.
struct LatticeReduction {
  Eigen::VectorXcd reduced;
  Eigen::VectorXi m;
  Eigen::VectorXi n;
};

/// Chooses m = round(Y^{-1} Im z) and n = round(Re(z - tau m)), so that
/// |Y^{-1} Im(reduced)|_inf <= 1/2 and |Re(reduced)|_inf <= 1/2.
LatticeReduction lattice_reduce(const PeriodMatrix& tau, const Eigen::VectorXcd& z);

/// Sup-norm distance of z to the nearest lattice point tau m + n (after
/// reduction); meaningful when z is close to the lattice.
double lattice_distance(const PeriodMatrix& tau, const Eigen::VectorXcd& z);

/// The half period tau * top + bottom attached to a characteristic given by
/// its real top/bottom vectors.
Eigen::VectorXcd half_period(const PeriodMatrix& tau, const Eigen::VectorXd& top,
                             const Eigen::VectorXd& bottom);

}  // namespace thetaforge
