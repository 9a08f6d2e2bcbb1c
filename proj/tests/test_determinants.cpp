#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"
#include "thetaforge/determinants.hpp"
#include "thetaforge/theta.hpp"

using namespace thetaforge;
using support::I;
using support::pi;

namespace {

constexpr double eps = 1e-13;

Characteristic ch(std::vector<int> top2, std::vector<int> bottom2) {
  return Characteristic(std::move(top2), std::move(bottom2));
}

// A point of the theta divisor: start at an odd half-period, move z_1 a
// little and restore theta = 0 by damped Newton in z_2.
Eigen::VectorXcd point_on_divisor(const PeriodMatrix& t, Rng& rng) {
  const Eigen::VectorXd top = ch({1, 0}, {1, 0}).top_vector();
  const Eigen::VectorXd bottom = ch({1, 0}, {1, 0}).bottom_vector();
  const auto zero = Characteristic::zero(2);
  for (int attempt = 0; attempt < 20; ++attempt) {
    Eigen::VectorXcd z = half_period(t, top, bottom);
    z(0) += cplx(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05));
    for (int it = 0; it < 60; ++it) {
      const auto jet = theta_jet(t, zero, z, eps, 1);
      cplx step = jet.value / jet.gradient(1);
      if (std::abs(step) > 0.1) step *= 0.1 / std::abs(step);
      z(1) -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const auto jet = theta_jet(t, zero, z, eps, 1);
    if (std::abs(jet.value) < 1e-13 * std::max(1.0, jet.gradient.norm())) return z;
  }
  FAIL("Newton did not reach the theta divisor");
  return {};
}

Eigen::VectorXcd lattice_vector(const PeriodMatrix& t, Rng& rng) {
  Eigen::VectorXd m(t.genus()), n(t.genus());
  for (int i = 0; i < t.genus(); ++i) m(i) = static_cast<double>(rng.below(3)) - 1;
  for (int i = 0; i < t.genus(); ++i) n(i) = static_cast<double>(rng.below(3)) - 1;
  if (m.isZero()) m(0) = 1;
  return t.tau() * m.cast<cplx>() + n.cast<cplx>();
}

}  // namespace

TEST_CASE("determinant by LU") {
  Eigen::MatrixXcd m(3, 3);
  m << 2.0, I, 0.0, 1.0, 3.0, -I, 0.5, 0.0, 1.0;
  CHECK(std::abs(determinant(m) - m.determinant()) < 1e-14);
  CHECK(std::abs(determinant(Eigen::MatrixXcd::Identity(4, 4)) - 1.0) < 1e-15);
}

TEST_CASE("g=1: J is theta_1 and eta is -theta_1^2") {
  Rng rng(21);
  for (int s = 0; s < 10; ++s) {
    const PeriodMatrix t(support::random_tau(1, rng));
    const Eigen::VectorXcd w = support::random_z(1, rng);
    const cplx t1 = theta_grad(t, Characteristic::zero(1), w, eps)[0].value;
    CHECK(std::abs(jacobian_points(t, {w}, eps) - t1) < 1e-13 * std::max(1.0, std::abs(t1)));
    CHECK(std::abs(eta_det(t, w, eps) + t1 * t1) < 1e-12 * std::max(1.0, std::norm(t1)));
  }
}

TEST_CASE("J against the 2x2 cofactor expansion and the alternating property") {
  Rng rng(22);
  for (int s = 0; s < 10; ++s) {
    const PeriodMatrix t(support::random_tau(2, rng));
    const Eigen::VectorXcd w1 = support::random_z(2, rng);
    const Eigen::VectorXcd w2 = support::random_z(2, rng);
    const auto g1 = theta_grad(t, Characteristic::zero(2), w1, eps);
    const auto g2 = theta_grad(t, Characteristic::zero(2), w2, eps);
    const cplx cofactor = g1[0].value * g2[1].value - g2[0].value * g1[1].value;
    const cplx j = jacobian_points(t, {w1, w2}, eps);
    CHECK(std::abs(j - cofactor) <= 1e-12 * std::max(1.0, std::abs(cofactor)));
    CHECK(std::abs(jacobian_points(t, {w2, w1}, eps) + j) <= 1e-12 * std::max(1.0, std::abs(j)));
  }
}

TEST_CASE("J picks up the sign of any permutation of its arguments") {
  Rng rng(23);
  const PeriodMatrix t(support::random_tau(3, rng));
  std::vector<Eigen::VectorXcd> w;
  for (int k = 0; k < 3; ++k) w.push_back(support::random_z(3, rng));
  const cplx base = jacobian_points(t, w, eps);
  std::vector<int> perm = {0, 1, 2};
  do {
    int inversions = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) inversions += perm[a] > perm[b];
    std::vector<Eigen::VectorXcd> pw;
    for (int k : perm) pw.push_back(w[k]);
    const double sgn = inversions % 2 ? -1.0 : 1.0;
    CHECK(std::abs(jacobian_points(t, pw, eps) - sgn * base) <= 1e-12 * std::abs(base));
    CHECK(norm_J(t, pw, eps) == doctest::Approx(norm_J(t, w, eps)).epsilon(1e-12));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("eta against the 3x3 cofactor expansion") {
  Rng rng(24);
  for (int s = 0; s < 10; ++s) {
    const PeriodMatrix t(support::random_tau(2, rng));
    const Eigen::VectorXcd z = support::random_z(2, rng);
    const auto jet = theta_jet(t, Characteristic::zero(2), z, eps, 2);
    const cplx g1 = jet.gradient(0), g2 = jet.gradient(1);
    const Eigen::MatrixXcd& h = jet.hessian;
    const cplx cofactor = -h(0, 0) * g2 * g2 + 2.0 * h(0, 1) * g1 * g2 - h(1, 1) * g1 * g1;
    const cplx e = eta_det(t, z, eps);
    CHECK(std::abs(e - cofactor) <= 1e-12 * std::max(1.0, std::abs(cofactor)));
  }
}

TEST_CASE("eta is even") {
  Rng rng(25);
  for (int s = 0; s < 30; ++s) {
    const int g = 1 + s % 3;
    const PeriodMatrix t(support::random_tau(g, rng));
    const Eigen::VectorXcd z = support::random_z(g, rng);
    const cplx a = eta_det(t, z, eps);
    const cplx b = eta_det(t, -z, eps);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("scaled determinants agree with the direct ones") {
  Rng rng(26);
  for (int s = 0; s < 20; ++s) {
    const int g = 1 + s % 3;
    const PeriodMatrix t(support::random_tau(g, rng));
    std::vector<Eigen::VectorXcd> w;
    for (int k = 0; k < g; ++k) w.push_back(support::random_z(g, rng, 1.2));
    const cplx j = jacobian_points(t, w, eps);
    CHECK(support::rel_diff(jacobian_points_scaled(t, w, eps).value(), j) < 1e-9);
    const cplx e = eta_det(t, w[0], eps);
    CHECK(support::rel_diff(eta_det_scaled(t, w[0], eps).value(), e) < 1e-9);
  }
}

TEST_CASE("nullwerte") {
  SUBCASE("g=1 equals the derivative and the brute-force series") {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = I;
    const PeriodMatrix t(m);
    const auto odd = ch({1}, {1});
    const cplx v = jacobian_nullwerte(t, {odd}, eps);
    const cplx d = theta_grad(t, odd, Eigen::VectorXcd::Zero(1), eps)[0].value;
    CHECK(std::abs(v - d) < 1e-13);
    const cplx brute = support::brute_theta(m, odd, Eigen::VectorXcd::Zero(1), 30).gradient(0);
    CHECK(std::abs(v - brute) < 1e-10);
  }
  SUBCASE("even or repeated columns give zero") {
    Rng rng(27);
    const PeriodMatrix t(support::random_tau(2, rng));
    const auto odd1 = ch({1, 0}, {1, 0});
    const auto odd2 = ch({0, 1}, {0, 1});
    const auto even = ch({1, 0}, {0, 0});
    const double scale = std::abs(jacobian_nullwerte(t, {odd1, odd2}, eps));
    CHECK(scale > 1e-3);
    CHECK(std::abs(jacobian_nullwerte(t, {odd1, even}, eps)) <= 1e-12 * scale);
    CHECK(std::abs(jacobian_nullwerte(t, {odd1, odd1}, eps)) <= 1e-12 * scale);
  }
  SUBCASE("representatives change the sign by the reduction rule") {
    Rng rng(28);
    const PeriodMatrix t(support::random_tau(2, rng));
    const auto odd1 = ch({1, 0}, {1, 0});
    const auto odd2 = ch({0, 1}, {0, 1});
    const auto shifted = ch({1, 0}, {3, 0});  // odd1 + (0; 1, 0), sign -1
    REQUIRE(reduce_characteristic(shifted).sign == -1);
    const cplx a = jacobian_nullwerte(t, {odd1, odd2}, eps);
    const cplx b = jacobian_nullwerte(t, {shifted, odd2}, eps);
    CHECK(std::abs(a + b) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("normalized J and eta prefactors") {
  Rng rng(29);
  const PeriodMatrix t(support::random_tau(1, rng));
  const double det = t.det_imag();
  Eigen::VectorXcd w(1);
  w(0) = 0.37;
  const cplx t1 = theta_grad(t, Characteristic::zero(1), w, eps)[0].value;
  CHECK(norm_J(t, {w}, eps) == doctest::Approx(std::pow(det, 0.75) * std::abs(t1)).epsilon(1e-12));
  CHECK(norm_eta(t, w, eps) ==
        doctest::Approx(std::pow(det, 1.5) * std::norm(t1)).epsilon(1e-12));

  // even half-period (0; 1/2) has y = 0
  Eigen::VectorXcd h(1);
  h(0) = 0.5;
  const cplx th = theta_grad(t, Characteristic::zero(1), h, eps)[0].value;
  CHECK(norm_eta(t, h, eps) == doctest::Approx(std::pow(det, 1.5) * std::norm(th)).epsilon(1e-12));

  const PeriodMatrix t2(support::random_tau(2, rng));
  Eigen::VectorXcd z = support::random_z(2, rng);
  const Eigen::VectorXd y = z.imag();
  const double expected = std::pow(t2.det_imag(), 7.0 / 4.0) *
                          std::exp(-pi * 3 * y.dot(t2.imag_inverse() * y)) *
                          std::abs(eta_det(t2, z, eps));
  CHECK(norm_eta(t2, z, eps) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(log_norm_eta(t2, z, eps) == doctest::Approx(std::log(expected)).epsilon(1e-10));
}

TEST_CASE("normalized J and eta are lattice invariant on the theta divisor") {
  Rng rng(30);
  for (int s = 0; s < 10; ++s) {
    const PeriodMatrix t(support::random_tau(2, rng));
    const Eigen::VectorXcd w1 = point_on_divisor(t, rng);
    const Eigen::VectorXcd w2 = point_on_divisor(t, rng);
    REQUIRE(std::abs(theta(t, Characteristic::zero(2), w1, eps).value) < 1e-12);
    REQUIRE(std::abs(theta(t, Characteristic::zero(2), w2, eps).value) < 1e-12);
    const Eigen::VectorXcd shift = lattice_vector(t, rng);
    const double before = norm_J(t, {w1, w2}, eps);
    const double after = norm_J(t, {w1, w2 + shift}, eps);
    CHECK(std::abs(before - after) <= 1e-8 * before);
    const double eb = norm_eta(t, w1, eps);
    const double ea = norm_eta(t, w1 + shift, eps);
    CHECK(std::abs(eb - ea) <= 1e-8 * eb);
  }
}
