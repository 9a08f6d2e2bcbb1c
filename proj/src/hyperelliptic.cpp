#include "thetaforge/hyperelliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "thetaforge/error.hpp"

namespace thetaforge {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int gauss_order = 20;

struct GaussRule {
  std::array<double, gauss_order> nodes;    // ascending in [-1, 1]
  std::array<double, gauss_order> weights;
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, gauss_order>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    GaussRule r{};
    const int half = gauss_order / 2;
    for (int i = 0; i < half; ++i) {
      r.nodes[half - 1 - i] = -x[i];
      r.weights[half - 1 - i] = w[i];
      r.nodes[half + i] = x[i];
      r.weights[half + i] = w[i];
    }
    return r;
  }();
  return rule;
}

// Integral of x^j / y_1(x + i0) over [a_l, a_{l+1}], midpoint rule in t
// after x = mid + h cos t.
Eigen::VectorXcd segment_integral(const std::vector<double>& a, int l, int nodes) {
  const int m = static_cast<int>(a.size());
  const int g = m / 2 - 1;
  const double h = 0.5 * (a[l + 1] - a[l]);
  const double mid = 0.5 * (a[l + 1] + a[l]);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(g);
  Eigen::VectorXd comp = Eigen::VectorXd::Zero(g);
  for (int k = 0; k < nodes; ++k) {
    const double t = (k + 0.5) * pi / nodes;
    const double x = mid + h * std::cos(t);
    double p = 1.0;
    for (int i = 0; i < m; ++i)
      if (i != l && i != l + 1) p *= std::abs(x - a[i]);
    double term = 1.0 / std::sqrt(p);
    for (int j = 0; j < g; ++j) {
      // Kahan summation keeps the roundoff floor flat as nodes double
      const double yv = term - comp(j);
      const double s = sum(j) + yv;
      comp(j) = (s - sum(j)) - yv;
      sum(j) = s;
      term *= x;
    }
  }
  // 1 / i^{2g+1-l}
  cplx phase = 1.0;
  for (int i = 0; i < 2 * g + 1 - l; ++i) phase *= cplx(0, 1);
  return (sum * (pi / nodes)).cast<cplx>() / phase;
}

Eigen::VectorXcd converged_segment(const std::vector<double>& a, int l, double eps) {
  int nodes = 64;
  Eigen::VectorXcd prev = segment_integral(a, l, nodes);
  while (true) {
    nodes *= 2;
    if (nodes > (1 << 22)) {
      throw Error(ErrorKind::numeric_failure, "period quadrature did not converge");
    }
    Eigen::VectorXcd next = segment_integral(a, l, nodes);
    const double diff = (next - prev).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
    prev = std::move(next);
    if (diff <= 0.1 * eps * scale) return prev;
  }
}

Eigen::VectorXcd omega(cplx x, cplx y, int g) {
  Eigen::VectorXcd v(g);
  cplx p = 1.0 / y;
  for (int j = 0; j < g; ++j) {
    v(j) = p;
    p *= x;
  }
  return v;
}

double segment_clearance(const HyperellipticCurve& curve, cplx p, cplx q) {
  double best = std::numeric_limits<double>::infinity();
  const cplx d = q - p;
  const double len2 = std::norm(d);
  for (double a : curve.branch_points()) {
    double t = len2 > 0 ? std::real((cplx(a) - p) * std::conj(d)) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::abs(p + t * d - a));
  }
  return best;
}

// Accumulates the integral of omega along the straight segment p -> q with
// y continued from y_prev; returns the new y.
cplx integrate_leg(const HyperellipticCurve& curve, cplx p, cplx q, cplx y_prev,
                   Eigen::VectorXcd& total) {
  const GaussRule& rule = gauss_rule();
  const int g = curve.genus();
  const double length = std::abs(q - p);
  if (length == 0) return y_prev;
  auto follow = [&](cplx x) {
    cplx y = principal_y(curve, x);
    if (std::abs(y - y_prev) > std::abs(y + y_prev)) y = -y;
    y_prev = y;
    return y;
  };
  double t = 0;
  int pieces = 0;
  while (t < 1.0) {
    const cplx here = p + t * (q - p);
    const double step = std::min(0.25 * curve.branch_distance(here) / length, 1.0 - t);
    if (!(step > 1e-14) || ++pieces > 100000) {
      throw Error(ErrorKind::path_failure, "integration path runs into a branch point");
    }
    const double lo = t;
    const double hi = (1.0 - t - step < 1e-15) ? 1.0 : t + step;
    const double half = 0.5 * (hi - lo);
    for (int k = 0; k < gauss_order; ++k) {
      const double s = lo + half * (rule.nodes[k] + 1.0);
      const cplx x = p + s * (q - p);
      total += (rule.weights[k] * half) * (q - p) * omega(x, follow(x), g);
    }
    follow(p + hi * (q - p));
    t = hi;
  }
  return y_prev;
}

// Integral from W_{2g+2} to a_last + d on the sheet where y_1 > 0,
// with x = a_last + u^2 absorbing the endpoint singularity.
Eigen::VectorXcd start_leg(const HyperellipticCurve& curve, double d) {
  const GaussRule& rule = gauss_rule();
  const auto& a = curve.branch_points();
  const int g = curve.genus();
  const double last = a.back();
  const int panels = 16;
  const double width = std::sqrt(d) / panels;
  Eigen::VectorXcd total = Eigen::VectorXcd::Zero(g);
  for (int p = 0; p < panels; ++p) {
    const double lo = p * width;
    for (int k = 0; k < gauss_order; ++k) {
      const double u = lo + 0.5 * width * (rule.nodes[k] + 1.0);
      const double x = last + u * u;
      double q = 1.0;
      for (std::size_t i = 0; i + 1 < a.size(); ++i) q *= std::sqrt(x - a[i]);
      double xp = 1.0;
      for (int j = 0; j < g; ++j) {
        total(j) += rule.weights[k] * 0.5 * width * 2.0 * xp / q;
        xp *= x;
      }
    }
  }
  return total;
}

double start_offset(const HyperellipticCurve& curve) {
  const auto& a = curve.branch_points();
  return std::min(0.5 * (a[a.size() - 1] - a[a.size() - 2]), 0.25 * curve.span());
}

// Unnormalized integral of omega from W_{2g+2} to p through the given route.
Eigen::VectorXcd raw_integral(const HyperellipticCurve& curve, const SurfacePoint& p,
                              const std::vector<cplx>& route) {
  const double d = start_offset(curve);
  const cplx xr = curve.branch_points().back() + d;
  Eigen::VectorXcd total = start_leg(curve, d);
  cplx y = principal_y(curve, xr);
  cplx from = xr;
  for (cplx to : route) {
    y = integrate_leg(curve, from, to, y, total);
    from = to;
  }
  y = integrate_leg(curve, from, p.x, y, total);
  const cplx target = static_cast<double>(p.sheet) * principal_y(curve, p.x);
  if (std::abs(y + target) < std::abs(y - target)) total = -total;
  return total;
}

double route_clearance(const HyperellipticCurve& curve, cplx start, const std::vector<cplx>& route,
                       cplx end) {
  double best = std::numeric_limits<double>::infinity();
  cplx from = start;
  for (cplx to : route) {
    best = std::min(best, segment_clearance(curve, from, to));
    from = to;
  }
  return std::min(best, segment_clearance(curve, from, end));
}

Eigen::VectorXcd aj_from_last(const HyperellipticCurve& curve, const PeriodData& pd,
                              const SurfacePoint& p) {
  if (const int k = curve.branch_index(p.x)) return weierstrass_image(pd, k);
  const double span = curve.span();
  const cplx xr = curve.branch_points().back() + start_offset(curve);
  const double need_cap = 0.5 * std::min(curve.branch_distance(p.x), curve.branch_distance(xr));
  for (double rel : {1e-2, 1e-3, 1e-4}) {
    const double r = rel * span;
    const double need = std::min(r, need_cap);
    if (route_clearance(curve, xr, {}, p.x) >= need) {
      return pd.basis_change * raw_integral(curve, p, {});
    }
    const double s = p.x.imag() < 0 ? -1.0 : 1.0;
    const double h = std::max(std::abs(p.x.imag()), r);
    const std::vector<cplx> detour{xr + cplx(0, s * h), cplx(p.x.real(), s * h)};
    if (route_clearance(curve, xr, detour, p.x) >= need) {
      return pd.basis_change * raw_integral(curve, p, detour);
    }
  }
  throw Error(ErrorKind::path_failure, "no admissible integration path found");
}

}  // namespace

HyperellipticCurve::HyperellipticCurve(std::vector<double> points) : a_(std::move(points)) {}

double HyperellipticCurve::min_gap() const noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < a_.size(); ++i) best = std::min(best, a_[i] - a_[i - 1]);
  return best;
}

double HyperellipticCurve::branch_distance(cplx x) const noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (double a : a_) best = std::min(best, std::abs(x - a));
  return best;
}

int HyperellipticCurve::branch_index(cplx x) const noexcept {
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (std::abs(x - a_[i]) <= 1e-14 * span()) return static_cast<int>(i) + 1;
  }
  return 0;
}

HyperellipticCurve new_curve(std::vector<double> points) {
  if (points.size() < 4 || points.size() % 2 != 0) {
    throw Error(ErrorKind::wrong_degree, "need an even number (at least 4) of branch points");
  }
  for (double v : points) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "non-finite branch point");
  }
  std::sort(points.begin(), points.end());
  const double span = points.back() - points.front();
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] - points[i - 1] > 1e-6 * span)) {
      throw Error(ErrorKind::duplicate_branch_point, "branch points coincide within tolerance");
    }
  }
  return HyperellipticCurve(std::move(points));
}

HyperellipticCurve random_curve(int genus, std::uint64_t seed, double min_gap) {
  const int n = 2 * genus + 2;
  const double room = 4.0 - (n - 1) * min_gap;
  if (genus < 1 || !(room > 0)) {
    throw Error(ErrorKind::invalid_argument, "cannot place branch points with this gap");
  }
  // uniform on the gap-constrained set: sort n draws in a shorter interval,
  // then spread them by i * min_gap
  Rng rng(seed);
  std::vector<double> u(n);
  for (double& v : u) v = rng.uniform(0.0, room);
  std::sort(u.begin(), u.end());
  for (int i = 0; i < n; ++i) u[i] = -2.0 + u[i] + i * min_gap;
  return new_curve(std::move(u));
}

cplx principal_y(const HyperellipticCurve& curve, cplx x) {
  cplx y = 1.0;
  for (double a : curve.branch_points()) y *= std::sqrt(x - a);
  return y;
}

SurfacePoint weierstrass_point(const HyperellipticCurve& curve, int k) {
  return {curve.branch_point(k), 1};
}

int Divisor::degree() const {
  int d = 0;
  for (const auto& [p, w] : terms) d += w;
  return d;
}

std::vector<Eigen::VectorXcd> segment_integrals_from_periods(const Eigen::MatrixXcd& a_periods,
                                                             const Eigen::MatrixXcd& b_periods,
                                                             int b_orientation) {
  const int g = static_cast<int>(a_periods.rows());
  std::vector<Eigen::VectorXcd> seg(2 * g + 1, Eigen::VectorXcd::Zero(g));
  const Eigen::MatrixXcd b = static_cast<double>(b_orientation) * b_periods;
  Eigen::VectorXcd cut_sum = Eigen::VectorXcd::Zero(g);
  for (int k = 0; k < g; ++k) {
    seg[2 * k] = 0.5 * a_periods.col(k);
    cut_sum += seg[2 * k];
    const Eigen::VectorXcd next = (k + 1 < g) ? Eigen::VectorXcd(b.col(k + 1))
                                              : Eigen::VectorXcd::Zero(g);
    seg[2 * k + 1] = 0.5 * (b.col(k) - next);
  }
  seg[2 * g] = -cut_sum;
  return seg;
}

Eigen::VectorXcd weierstrass_image(const PeriodData& pd, int k) {
  const int g = pd.tau.genus();
  if (k < 1 || k > 2 * g + 2) {
    throw Error(ErrorKind::invalid_argument, "Weierstrass point index out of range");
  }
  Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(g);
  for (int l = k - 1; l <= 2 * g && k <= 2 * g + 1; ++l) sum += pd.segment_integrals[l];
  return -(pd.basis_change * sum);
}

namespace {

Eigen::VectorXcd characteristic_point(const PeriodMatrix& tau, const Characteristic& c) {
  return half_period(tau, c.top_vector(), c.bottom_vector());
}

// Cold and cached paths both go through here, so they agree bit for bit:
// B and the segment integrals are always rebuilt from (A, tau, orientation).
PeriodData finish(Eigen::MatrixXcd a_periods, const Eigen::MatrixXcd& tau_raw, int orientation,
                  double eps) {
  std::optional<PeriodMatrix> tau;
  try {
    tau.emplace(tau_raw, 1e-9);
  } catch (const Error& e) {
    throw Error(ErrorKind::numeric_failure, std::string("computed period matrix invalid: ") + e.what());
  }
  const Eigen::MatrixXcd c = a_periods.inverse();
  Eigen::MatrixXcd b_periods = a_periods * tau->tau();
  auto segments = segment_integrals_from_periods(a_periods, b_periods, orientation);
  PeriodData pd{std::move(a_periods), std::move(b_periods), *tau, c, orientation,
                std::move(segments), Eigen::VectorXcd(), eps};
  const int g = tau->genus();
  const IndexSet u = odd_set(g);
  auto window = [g](int start) {
    std::vector<int> m;
    for (int j = start; j < start + g - 1; ++j) m.push_back(j);
    return IndexSet(g, m);
  };
  auto images = [&](const IndexSet& t) {
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(g);
    for (int j : t.members()) s += weierstrass_image(pd, j);
    return s;
  };
  const IndexSet t0 = window(1);
  pd.riemann_shift =
      characteristic_point(pd.tau, characteristic_of_set(sym_diff(t0, u))) - images(t0);
  for (int start = 2; start <= g + 1; ++start) {
    const IndexSet t = window(start);
    const Eigen::VectorXcd expected = characteristic_point(pd.tau, characteristic_of_set(sym_diff(t, u)));
    if (lattice_distance(pd.tau, images(t) + pd.riemann_shift - expected) > 1e-8) {
      throw Error(ErrorKind::numeric_failure, "Riemann shift calibration is inconsistent");
    }
  }
  return pd;
}

}  // namespace

PeriodData periods(const HyperellipticCurve& curve, double eps) {
  if (!std::isfinite(eps) || eps <= 0) {
    throw Error(ErrorKind::invalid_tolerance, "tolerance must be positive");
  }
  const int g = curve.genus();
  std::vector<Eigen::VectorXcd> seg;
  for (int l = 0; l <= 2 * g; ++l) seg.push_back(converged_segment(curve.branch_points(), l, eps));
  Eigen::MatrixXcd a(g, g), b(g, g);
  for (int k = 0; k < g; ++k) {
    a.col(k) = 2.0 * seg[2 * k];
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(g);
    for (int m = k; m < g; ++m) s += seg[2 * m + 1];
    b.col(k) = 2.0 * s;
  }
  const Eigen::MatrixXcd c = a.inverse();
  Eigen::MatrixXcd tau = c * b;
  int orientation = 1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (tau.imag() + tau.imag().transpose()),
                                                     Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < 0) {
    b = -b;
    tau = -tau;
    orientation = -1;
  }
  return finish(std::move(a), tau, orientation, eps);
}

PeriodData period_data_from(const HyperellipticCurve& curve, const Eigen::MatrixXcd& a_periods,
                            const Eigen::MatrixXcd& tau, int b_orientation,
                            const Eigen::VectorXcd& riemann_shift, double eps) {
  const int g = curve.genus();
  if (a_periods.rows() != g || a_periods.cols() != g || tau.rows() != g || tau.cols() != g ||
      riemann_shift.size() != g) {
    throw Error(ErrorKind::dimension_mismatch, "stored periods do not match the curve genus");
  }
  PeriodData pd = finish(a_periods, tau, b_orientation, eps);
  if ((pd.riemann_shift - riemann_shift).cwiseAbs().maxCoeff() > 1e-8) {
    throw Error(ErrorKind::numeric_failure, "stored Riemann shift disagrees with the periods");
  }
  pd.riemann_shift = riemann_shift;
  return pd;
}

Eigen::VectorXcd abel_jacobi(const HyperellipticCurve& curve, const PeriodData& pd,
                             const SurfacePoint& p, int base_index, double eps) {
  (void)eps;
  return aj_from_last(curve, pd, p) - weierstrass_image(pd, base_index);
}

Eigen::VectorXcd abel_jacobi_via(const HyperellipticCurve& curve, const PeriodData& pd,
                                 const SurfacePoint& p, int base_index,
                                 const std::vector<cplx>& waypoints, double eps) {
  (void)eps;
  const cplx xr = curve.branch_points().back() + start_offset(curve);
  if (curve.branch_index(p.x)) {
    throw Error(ErrorKind::invalid_argument, "custom routes need a non-branch endpoint");
  }
  const double need =
      0.5 * std::min({curve.branch_distance(p.x), curve.branch_distance(xr), 1e-4 * curve.span()});
  if (route_clearance(curve, xr, waypoints, p.x) < need) {
    throw Error(ErrorKind::path_failure, "route passes too close to a branch point");
  }
  return pd.basis_change * raw_integral(curve, p, waypoints) - weierstrass_image(pd, base_index);
}

Eigen::VectorXcd divisor_class(const HyperellipticCurve& curve, const PeriodData& pd,
                               const Divisor& d, double eps) {
  const int g = curve.genus();
  if (d.degree() != g - 1) {
    throw Error(ErrorKind::wrong_degree, "divisor must have degree g-1");
  }
  Eigen::VectorXcd sum = pd.riemann_shift;
  for (const auto& [p, w] : d.terms) {
    if (w != 0) sum += static_cast<double>(w) * abel_jacobi(curve, pd, p, 2 * g + 2, eps);
  }
  return sum;
}

Characteristic weierstrass_class(int genus, const IndexSet& t) {
  if (t.genus() != genus) throw Error(ErrorKind::dimension_mismatch, "index set genus mismatch");
  if (t.size() != genus - 1 && t.size() != genus + 1) {
    throw Error(ErrorKind::invalid_argument, "Weierstrass divisor needs g-1 or g+1 points");
  }
  return characteristic_of_set(sym_diff(t, odd_set(genus)));
}

SurfacePoint random_point(const HyperellipticCurve& curve, Rng& rng,
                          const SamplingRegion& region) {
  const double span = curve.span();
  const double lo = curve.branch_points().front() - region.margin * span;
  const double hi = curve.branch_points().back() + region.margin * span;
  while (true) {
    const cplx x(rng.uniform(lo, hi), rng.uniform(-region.height * span, region.height * span));
    const int sheet = rng.sign();
    if (curve.branch_distance(x) >= region.exclusion * span) return {x, sheet};
  }
}

SurfacePoint random_point(const HyperellipticCurve& curve, std::uint64_t seed,
                          const SamplingRegion& region) {
  Rng rng(seed);
  return random_point(curve, rng, region);
}

}  // namespace thetaforge
