#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thetaforge/characteristic.hpp"
#include "thetaforge/error.hpp"
#include "thetaforge/hyperelliptic.hpp"
#include "thetaforge/period_matrix.hpp"
#include "thetaforge/rng.hpp"
#include "thetaforge/verifier.hpp"

namespace support {

using thetaforge::cplx;
inline constexpr double pi = std::numbers::pi;
inline const cplx I(0, 1);

/// Random point of the Siegel upper half space: X uniform in [-1/2, 1/2],
/// Y = B B^T + 0.6 I with B uniform in [-1/2, 1/2].
inline Eigen::MatrixXcd random_tau(int g, thetaforge::Rng& rng) {
  Eigen::MatrixXd x(g, g), b(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j <= i; ++j) x(i, j) = x(j, i) = rng.uniform(-0.5, 0.5);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) b(i, j) = rng.uniform(-0.5, 0.5);
  const Eigen::MatrixXd y = b * b.transpose() + 0.6 * Eigen::MatrixXd::Identity(g, g);
  return x.cast<cplx>() + I * y.cast<cplx>();
}

inline Eigen::VectorXcd random_z(int g, thetaforge::Rng& rng, double scale = 0.5) {
  Eigen::VectorXcd z(g);
  for (int i = 0; i < g; ++i) z(i) = cplx(rng.uniform(-scale, scale), rng.uniform(-scale, scale));
  return z;
}

inline thetaforge::Characteristic random_canonical(int g, thetaforge::Rng& rng) {
  std::vector<int> top(g), bottom(g);
  for (int i = 0; i < g; ++i) top[i] = static_cast<int>(rng.below(2));
  for (int i = 0; i < g; ++i) bottom[i] = static_cast<int>(rng.below(2));
  return thetaforge::Characteristic(top, bottom);
}

struct BruteJet {
  cplx value;
  Eigen::VectorXcd gradient;
  Eigen::MatrixXcd hessian;
};

/// Series sum over the box |n_i| <= N straight from the definition
/// sum exp(pi i (n+a)^T tau (n+a) + 2 pi i (n+a)^T (z+b)), with term-wise
/// first and second derivatives.
inline BruteJet brute_theta(const Eigen::MatrixXcd& tau, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b, const Eigen::VectorXcd& z, int N) {
  const int g = static_cast<int>(tau.rows());
  BruteJet out{0.0, Eigen::VectorXcd::Zero(g), Eigen::MatrixXcd::Zero(g, g)};
  std::vector<int> n(g, -N);
  while (true) {
    Eigen::VectorXcd v(g);
    for (int i = 0; i < g; ++i) v(i) = n[i] + a(i);
    const cplx e = std::exp(I * pi * v.dot(tau * v) + 2.0 * pi * I * v.dot(z + b.cast<cplx>()));
    const Eigen::VectorXcd d = 2.0 * pi * I * v;
    out.value += e;
    out.gradient += e * d;
    out.hessian += e * d * d.transpose();
    int i = 0;
    while (i < g && n[i] == N) n[i++] = -N;
    if (i == g) break;
    ++n[i];
  }
  return out;
}

inline BruteJet brute_theta(const Eigen::MatrixXcd& tau, const thetaforge::Characteristic& alpha,
                            const Eigen::VectorXcd& z, int N) {
  return brute_theta(tau, alpha.top_vector(), alpha.bottom_vector(), z, N);
}

inline double rel_diff(cplx a, cplx b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0 ? 0 : std::abs(a - b) / s;
}

/// Random p_1..p_g, q whose identity inputs are in generic position;
/// resamples up to ten times like the suite does.
struct PointTuple {
  std::vector<thetaforge::SurfacePoint> p;
  thetaforge::SurfacePoint q;
};

inline std::optional<PointTuple> generic_tuple(const thetaforge::HyperellipticCurve& curve,
                                               const thetaforge::PeriodData& pd,
                                               thetaforge::Rng& rng, double eps,
                                               double delta_gen) {
  for (int attempt = 0; attempt < 10; ++attempt) {
    PointTuple t;
    for (int k = 0; k < curve.genus(); ++k) t.p.push_back(thetaforge::random_point(curve, rng));
    t.q = thetaforge::random_point(curve, rng);
    try {
      thetaforge::IdentityInputs in(curve, pd, t.p, t.q, eps, delta_gen);
      return t;
    } catch (const thetaforge::Error& e) {
      if (e.kind() != thetaforge::ErrorKind::generic_position) throw;
    }
  }
  return std::nullopt;
}

}  // namespace support
