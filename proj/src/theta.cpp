#include "thetaforge/theta.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "thetaforge/error.hpp"
#include "thetaforge/lattice.hpp"

namespace thetaforge {

namespace {

constexpr double pi = std::numbers::pi;

void check_order(int order) {
  if (order < 0 || order > 2) {
    throw Error(ErrorKind::invalid_argument, "derivative order must be 0, 1 or 2");
  }
}

void check_dimension(const PeriodMatrix& tau, Eigen::Index n) {
  if (n != tau.genus()) {
    throw Error(ErrorKind::dimension_mismatch, "vector length does not match genus");
  }
}

// int_{t0}^inf t^m exp(-pi t^2) dt for m = 0..max_m, via the upper
// incomplete gamma recurrence in steps of one.
std::vector<double> gaussian_moments(double t0, int max_m) {
  const double x = pi * t0 * t0;
  const double ex = std::exp(-x);
  std::vector<double> gamma(max_m + 1);
  // gamma[m] = Gamma((m + 1) / 2, x)
  gamma[0] = std::sqrt(pi) * std::erfc(std::sqrt(x));
  if (max_m >= 1) gamma[1] = ex;
  for (int m = 2; m <= max_m; ++m) {
    const double a = 0.5 * (m - 1);
    gamma[m] = a * gamma[m - 2] + std::pow(x, a) * ex;
  }
  std::vector<double> out(max_m + 1);
  for (int m = 0; m <= max_m; ++m) {
    out[m] = 0.5 * std::pow(pi, -0.5 * (m + 1)) * gamma[m];
  }
  return out;
}

}  // namespace

void check_tolerance(double eps) {
  if (!std::isfinite(eps) || eps <= 0) {
    throw Error(ErrorKind::invalid_tolerance, "tolerance must be positive");
  }
  if (eps < min_tolerance) {
    throw Error(ErrorKind::invalid_tolerance, "tolerance below 1e-13 is not supported");
  }
}

double tail_bound(const PeriodMatrix& tau, const Eigen::VectorXd& y_shift, double radius,
                  int order) {
  check_order(order);
  check_dimension(tau, y_shift.size());
  const int g = tau.genus();
  const double rho = std::sqrt(tau.min_eigenvalue());
  if (!(radius >= rho)) return std::numeric_limits<double>::infinity();

  const Eigen::VectorXd w = tau.imag_inverse() * y_shift;
  const double s = w.norm();
  const double quad = y_shift.dot(w);

  // (t + rho/2)^(g-1) * (t/rho + 1 + s)^order, ascending coefficients in t
  std::vector<double> poly{1.0};
  auto multiply = [&poly](double c0, double c1) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += c0 * poly[i];
      next[i + 1] += c1 * poly[i];
    }
    poly = std::move(next);
  };
  for (int i = 0; i < g - 1; ++i) multiply(0.5 * rho, 1.0);
  for (int i = 0; i < order; ++i) multiply(1.0 + s, 1.0 / rho);

  const auto moments = gaussian_moments(radius - rho, static_cast<int>(poly.size()) - 1);
  double integral = 0;
  for (std::size_t m = 0; m < poly.size(); ++m) integral += poly[m] * moments[m];

  return std::exp(pi * quad) * std::pow(2 * pi, order) * g * std::pow(2.0 / rho, g) * integral;
}

double truncation_radius(const PeriodMatrix& tau, const Eigen::VectorXd& y_shift, double eps,
                         int order) {
  if (!std::isfinite(eps) || eps <= 0) {
    throw Error(ErrorKind::invalid_tolerance, "tolerance must be positive");
  }
  check_order(order);
  check_dimension(tau, y_shift.size());
  const double rho = std::sqrt(tau.min_eigenvalue());
  auto ok = [&](double r) { return tail_bound(tau, y_shift, r, order) <= eps; };
  if (ok(rho)) return rho;
  double lo = rho;
  double hi = 2 * rho;
  for (int i = 0; !ok(hi); ++i) {
    if (i > 200) throw Error(ErrorKind::numeric_failure, "truncation radius search diverged");
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

ThetaJet theta_jet(const PeriodMatrix& tau, const Characteristic& alpha,
                   const Eigen::VectorXcd& z, double eps, int order) {
  check_dimension(tau, z.size());
  check_dimension(tau, alpha.genus());
  check_tolerance(eps);
  check_order(order);
  const int g = tau.genus();
  if (!z.allFinite()) throw Error(ErrorKind::invalid_argument, "non-finite argument");

  const Eigen::VectorXd a = alpha.top_vector();
  const Eigen::VectorXd y = z.imag();
  const Eigen::VectorXd center = a + tau.imag_inverse() * y;
  const double radius = truncation_radius(tau, y, eps, order);
  const Eigen::VectorXcd zb = z + alpha.bottom_vector().cast<cplx>();
  const Eigen::MatrixXcd& t = tau.tau();

  cplx value = 0;
  std::vector<cplx> grad(g, 0.0);
  std::vector<cplx> hess(static_cast<std::size_t>(g * g), 0.0);
  std::vector<double> x(g);
  std::size_t count = 0;

  enumerate_ellipsoid(tau.cholesky_upper(), center, radius, [&](const Eigen::VectorXd& n) {
    ++count;
    for (int j = 0; j < g; ++j) x[j] = n(j) + a(j);
    cplx quad = 0;
    cplx lin = 0;
    for (int j = 0; j < g; ++j) {
      cplx row = 0;
      for (int k = 0; k < g; ++k) row += t(j, k) * x[k];
      quad += x[j] * row;
      lin += x[j] * zb(j);
    }
    const cplx term = std::exp(cplx(0, pi) * (quad + 2.0 * lin));
    value += term;
    if (order >= 1) {
      for (int j = 0; j < g; ++j) {
        const cplx xt = x[j] * term;
        grad[j] += xt;
        if (order >= 2) {
          for (int k = j; k < g; ++k) hess[j * g + k] += x[k] * xt;
        }
      }
    }
  });

  ThetaJet jet;
  jet.order = order;
  jet.value = value;
  jet.lattice_points = count;
  jet.value_error = tail_bound(tau, y, radius, 0);
  const cplx two_pi_i(0, 2 * pi);
  if (order >= 1) {
    jet.gradient.resize(g);
    for (int j = 0; j < g; ++j) jet.gradient(j) = two_pi_i * grad[j];
    jet.gradient_error = tail_bound(tau, y, radius, 1);
  }
  if (order >= 2) {
    jet.hessian.resize(g, g);
    for (int j = 0; j < g; ++j) {
      for (int k = j; k < g; ++k) {
        jet.hessian(j, k) = two_pi_i * two_pi_i * hess[j * g + k];
        jet.hessian(k, j) = jet.hessian(j, k);
      }
    }
    jet.hessian_error = tail_bound(tau, y, radius, 2);
  }
  return jet;
}

ThetaValue theta(const PeriodMatrix& tau, const Characteristic& alpha, const Eigen::VectorXcd& z,
                 double eps) {
  const ThetaJet jet = theta_jet(tau, alpha, z, eps, 0);
  return {jet.value, jet.value_error};
}

std::vector<ThetaValue> theta_grad(const PeriodMatrix& tau, const Characteristic& alpha,
                                   const Eigen::VectorXcd& z, double eps) {
  const ThetaJet jet = theta_jet(tau, alpha, z, eps, 1);
  std::vector<ThetaValue> out;
  for (Eigen::Index j = 0; j < jet.gradient.size(); ++j) {
    out.push_back({jet.gradient(j), jet.gradient_error});
  }
  return out;
}

Eigen::MatrixXcd SymmetricThetaMatrix::values() const {
  Eigen::MatrixXcd m(g_, g_);
  for (int j = 0; j < g_; ++j)
    for (int k = 0; k < g_; ++k) m(j, k) = (*this)(j, k).value;
  return m;
}

SymmetricThetaMatrix theta_hess(const PeriodMatrix& tau, const Characteristic& alpha,
                                const Eigen::VectorXcd& z, double eps) {
  const ThetaJet jet = theta_jet(tau, alpha, z, eps, 2);
  const int g = tau.genus();
  SymmetricThetaMatrix out(g);
  for (int j = 0; j < g; ++j)
    for (int k = j; k < g; ++k) out(j, k) = {jet.hessian(j, k), jet.hessian_error};
  return out;
}

ScaledThetaJet theta_jet_scaled(const PeriodMatrix& tau, const Characteristic& alpha,
                                const Eigen::VectorXcd& z, double eps, int order) {
  check_dimension(tau, z.size());
  ScaledThetaJet out;
  out.reduction = lattice_reduce(tau, z);
  const Eigen::VectorXcd& z0 = out.reduction.reduced;
  const Eigen::VectorXcd m = out.reduction.m.cast<cplx>();
  const Eigen::VectorXcd n = out.reduction.n.cast<cplx>();
  const Eigen::VectorXcd a = alpha.top_vector().cast<cplx>();
  const Eigen::VectorXcd b = alpha.bottom_vector().cast<cplx>();
  const cplx i_pi(0, pi);

  out.log_factor = -i_pi * m.dot(tau.tau() * m) - 2.0 * i_pi * m.dot(z0 + b) +
                   2.0 * i_pi * a.dot(n);

  ThetaJet jet = theta_jet(tau, alpha, z0, eps, order);
  // d/dz of the exponent above
  const Eigen::VectorXcd c = -2.0 * i_pi * m;
  const double cmax = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  if (order >= 2) {
    jet.hessian += c * jet.gradient.transpose() + jet.gradient * c.transpose() +
                   jet.value * (c * c.transpose());
    jet.hessian_error += 2 * cmax * jet.gradient_error + cmax * cmax * jet.value_error;
  }
  if (order >= 1) {
    jet.gradient += jet.value * c;
    jet.gradient_error += cmax * jet.value_error;
  }
  out.jet = std::move(jet);
  return out;
}

double log_norm_theta(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps) {
  const auto sj = theta_jet_scaled(tau, Characteristic::zero(tau.genus()), z, eps, 0);
  const Eigen::VectorXd y = z.imag();
  return 0.25 * std::log(tau.det_imag()) - pi * y.dot(tau.imag_inverse() * y) +
         sj.log_factor.real() + std::log(std::abs(sj.jet.value));
}

double norm_theta(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps) {
  return std::exp(log_norm_theta(tau, z, eps));
}

}  // namespace thetaforge
