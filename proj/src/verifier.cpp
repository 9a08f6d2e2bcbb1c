#include "thetaforge/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "thetaforge/charsys.hpp"
#include "thetaforge/curve_io.hpp"
#include "thetaforge/error.hpp"
#include "thetaforge/theta.hpp"

namespace thetaforge {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;
const double ln10 = std::log(10.0);

// |exp(w) - 1| without cancellation for small w
double abs_expm1(cplx w) {
  const double a = w.real();
  const double b = w.imag();
  const double s = std::sin(0.5 * b);
  const double re = std::expm1(a) * std::cos(b) - 2 * s * s;
  const double im = std::exp(a) * std::sin(b);
  return std::hypot(re, im);
}

// Fills lhs/rhs/residual from the logs of both sides.
void set_sides(IdentityReport& r, cplx log_lhs, cplx log_rhs) {
  const bool lhs_zero = std::isinf(log_lhs.real()) && log_lhs.real() < 0;
  const bool rhs_zero = std::isinf(log_rhs.real()) && log_rhs.real() < 0;
  if (lhs_zero || rhs_zero) {
    throw Error(ErrorKind::generic_position, "one side of the identity vanishes");
  }
  if (!std::isfinite(log_lhs.real()) || !std::isfinite(log_rhs.real())) {
    throw Error(ErrorKind::numeric_failure, "identity side is not finite");
  }
  const double top = std::max(log_lhs.real(), log_rhs.real());
  r.log10_scale = std::floor(top / ln10);
  r.lhs = std::exp(log_lhs - r.log10_scale * ln10);
  r.rhs = std::exp(log_rhs - r.log10_scale * ln10);
  // |L - R| / max(|L|, |R|): divide by the larger side
  const cplx w = log_rhs - log_lhs;
  r.rel_residual = (w.real() <= 0) ? abs_expm1(w) : abs_expm1(-w);
}

IdentityReport make_report(IdentityId id, int genus, double eps) {
  IdentityReport r;
  r.id = id;
  r.genus = genus;
  r.digest.eps = eps;
  return r;
}

json complex_json(cplx v) {
  return {{"re", format_double(v.real())}, {"im", format_double(v.imag())}};
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix(seed);
  for (std::uint64_t v : path) h = splitmix(h ^ splitmix(v + 0x632be59bd9b4e019ULL));
  return h;
}

int pow_sign(long exponent) { return (exponent % 2 == 0) ? 1 : -1; }

long binom3(int n) { return static_cast<long>(n) * (n - 1) * (n - 2) / 6; }

}  // namespace

const char* to_string(IdentityId id) noexcept {
  switch (id) {
    case IdentityId::thm1_i: return "thm1_i";
    case IdentityId::thm1_ii: return "thm1_ii";
    case IdentityId::thm1_iii: return "thm1_iii";
    case IdentityId::cor_products: return "cor_products";
    case IdentityId::thm2: return "thm2";
    case IdentityId::normed_i: return "normed_i";
    case IdentityId::normed_ii: return "normed_ii";
    case IdentityId::normed_iii: return "normed_iii";
    case IdentityId::jacobi_g1: return "jacobi_g1";
    case IdentityId::rosenhain_g2: return "rosenhain_g2";
  }
  return "unknown";
}

Variant parse_variant(const std::string& text) {
  if (text == "i") return Variant::i;
  if (text == "ii") return Variant::ii;
  if (text == "iii") return Variant::iii;
  throw Error(ErrorKind::invalid_argument, "variant must be i, ii or iii");
}

json to_json(const IdentityReport& r) {
  json j;
  j["identity"] = to_string(r.id);
  j["genus"] = r.genus;
  j["lhs"] = complex_json(r.lhs);
  j["rhs"] = complex_json(r.rhs);
  j["log10_scale"] = format_double(r.log10_scale);
  j["rel_residual"] = format_double(r.rel_residual);
  if (r.sign) j["sign"] = *r.sign;
  json d;
  d["curve_hash"] = r.digest.curve_hash;
  d["seed"] = r.digest.seed;
  d["trial"] = r.digest.trial;
  d["sigma"] = r.digest.sigma;
  d["eps"] = format_double(r.digest.eps);
  j["inputs"] = d;
  return j;
}

double generic_threshold(const PeriodMatrix& tau, double eps, std::uint64_t seed) {
  const int g = tau.genus();
  Rng rng(seed);
  std::vector<double> norms;
  for (int s = 0; s < 100; ++s) {
    Eigen::VectorXd u(g), v(g);
    for (int i = 0; i < g; ++i) u(i) = rng.uniform(-0.5, 0.5);
    for (int i = 0; i < g; ++i) v(i) = rng.uniform(-0.5, 0.5);
    const Eigen::VectorXcd z = tau.tau() * u.cast<cplx>() + v.cast<cplx>();
    norms.push_back(norm_theta(tau, z, eps));
  }
  std::sort(norms.begin(), norms.end());
  return 1e-6 * 0.5 * (norms[49] + norms[50]);
}

IdentityInputs::IdentityInputs(const HyperellipticCurve& curve, const PeriodData& pd,
                               const std::vector<SurfacePoint>& p, const SurfacePoint& q,
                               double eps, double delta_gen)
    : g_(curve.genus()), eps_(eps) {
  const int g = g_;
  if (static_cast<int>(p.size()) != g) {
    throw Error(ErrorKind::dimension_mismatch, "need exactly g points p_1..p_g");
  }
  check_tolerance(eps);
  const PeriodMatrix& tau = pd.tau;
  const double log_det = std::log(tau.det_imag());
  const double log_delta = std::log(delta_gen);
  const auto zero = Characteristic::zero(g);

  std::vector<Eigen::VectorXcd> a;
  for (const auto& pk : p) a.push_back(abel_jacobi(curve, pd, pk, 2 * g + 2, eps));
  const Eigen::VectorXcd b = abel_jacobi(curve, pd, q, 2 * g + 2, eps);
  Eigen::VectorXcd s = pd.riemann_shift;
  for (const auto& ak : a) s += ak;

  auto quad = [&](const Eigen::VectorXcd& z) {
    const Eigen::VectorXd y = z.imag();
    return y.dot(tau.imag_inverse() * y);
  };
  auto theta_at = [&](const Eigen::VectorXcd& z) {
    const auto sj = theta_jet_scaled(tau, zero, z, eps, 0);
    Value v;
    v.log = sj.log_factor + std::log(sj.jet.value);
    v.log_normed = 0.25 * log_det - pi * quad(z) + v.log.real();
    if (!(v.log_normed >= log_delta)) {
      throw Error(ErrorKind::generic_position, "theta vanishes at a sampled divisor class");
    }
    return v;
  };
  auto eta_from = [&](const ScaledThetaJet& sj, const Eigen::VectorXcd& z) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(g + 1, g + 1);
    m.topLeftCorner(g, g) = sj.jet.hessian;
    m.topRightCorner(g, 1) = sj.jet.gradient;
    m.bottomLeftCorner(1, g) = sj.jet.gradient.transpose();
    Value v;
    v.log = static_cast<double>(g + 1) * sj.log_factor + std::log(determinant(m));
    v.log_normed = 0.25 * (g + 5) * log_det - pi * (g + 1) * quad(z) + v.log.real();
    return v;
  };

  const Eigen::VectorXcd d = s - b;
  theta_d_ = theta_at(d);
  theta_e_.resize(g * g);
  theta_f_.resize(g * g);
  theta_h_.resize(g * g);
  for (int j = 0; j < g; ++j) {
    theta_g_.push_back(theta_at(static_cast<double>(g) * a[j] - b + pd.riemann_shift));
    for (int k = 0; k < g; ++k) {
      if (j == k) continue;
      theta_e_[j * g + k] = theta_at(s - a[j] + a[k] - b);
      theta_f_[j * g + k] = theta_at(s - 2.0 * a[j] + a[k]);
      theta_h_[j * g + k] = theta_at(static_cast<double>(g) * a[j] - a[k] + pd.riemann_shift);
    }
  }

  Eigen::MatrixXcd jac(g, g);
  cplx jac_log_scale = 0;
  double jac_quad = 0;
  for (int k = 0; k < g; ++k) {
    const Eigen::VectorXcd dk = s - a[k];
    const auto sj = theta_jet_scaled(tau, zero, dk, eps, 2);
    eta_d_.push_back(eta_from(sj, dk));
    jac.col(k) = sj.jet.gradient;
    jac_log_scale += sj.log_factor;
    jac_quad += quad(dk);

    const Eigen::VectorXcd kk = static_cast<double>(g - 1) * a[k] + pd.riemann_shift;
    eta_k_.push_back(eta_from(theta_jet_scaled(tau, zero, kk, eps, 2), kk));
  }
  jacobian_.log = jac_log_scale + std::log(determinant(jac));
  jacobian_.log_normed = 0.25 * (g + 2) * log_det - pi * jac_quad + jacobian_.log.real();
}

IdentityReport verify_thm1(const IdentityInputs& in, Variant variant, PointSign sign) {
  const int g = in.genus();
  static const IdentityId ids[] = {IdentityId::thm1_i, IdentityId::thm1_ii, IdentityId::thm1_iii};
  IdentityReport r = make_report(ids[static_cast<int>(variant)], g, in.eps());
  const int s = (sign == PointSign::minus_one_pow_g) ? pow_sign(g) : pow_sign(binom3(g + 2));
  const cplx log_sign = (s > 0) ? cplx(0) : cplx(0, pi);
  cplx lhs = 0;
  cplx rhs = 0;
  if (variant == Variant::iii) {
    lhs = static_cast<double>(g - 1) * in.eta_d(g - 1).log;
    for (int k = 0; k + 1 < g; ++k) {
      rhs += in.eta_k(k).log +
             static_cast<double>(g - 1) * (in.theta_e(g - 1, k).log - in.theta_g(k).log);
    }
  } else {
    rhs = log_sign + 2.0 * g * (in.jacobian().log - static_cast<double>(g - 1) * in.theta_d().log);
    for (int k = 0; k < g; ++k) {
      lhs += (variant == Variant::i) ? in.eta_d(k).log : in.eta_k(k).log;
    }
    for (int j = 0; j < g; ++j)
      for (int k = 0; k < g; ++k) {
        if (j == k) continue;
        rhs += (variant == Variant::i) ? 2.0 * in.theta_e(j, k).log - in.theta_f(j, k).log
                                       : 2.0 * in.theta_g(j).log - in.theta_h(j, k).log;
      }
  }
  set_sides(r, lhs, rhs);
  return r;
}

IdentityReport verify_cor_products(const IdentityInputs& in) {
  const int g = in.genus();
  IdentityReport r = make_report(IdentityId::cor_products, g, in.eps());
  cplx lhs = 0;
  cplx rhs = 0;
  for (int j = 0; j < g; ++j)
    for (int k = 0; k < g; ++k) {
      if (j == k) continue;
      lhs += in.theta_g(j).log - in.theta_h(j, k).log;
      rhs += in.theta_e(j, k).log - in.theta_f(j, k).log;
    }
  set_sides(r, lhs, rhs);
  return r;
}

IdentityReport verify_normed(const IdentityInputs& in, Variant variant) {
  const int g = in.genus();
  static const IdentityId ids[] = {IdentityId::normed_i, IdentityId::normed_ii,
                                   IdentityId::normed_iii};
  IdentityReport r = make_report(ids[static_cast<int>(variant)], g, in.eps());
  double lhs = 0;
  double rhs = 0;
  if (variant == Variant::iii) {
    lhs = (g - 1) * in.eta_d(g - 1).log_normed;
    for (int k = 0; k + 1 < g; ++k) {
      rhs += in.eta_k(k).log_normed +
             (g - 1) * (in.theta_e(g - 1, k).log_normed - in.theta_g(k).log_normed);
    }
  } else {
    rhs = 2.0 * g * (in.jacobian().log_normed - (g - 1) * in.theta_d().log_normed);
    for (int k = 0; k < g; ++k) {
      lhs += (variant == Variant::i) ? in.eta_d(k).log_normed : in.eta_k(k).log_normed;
    }
    for (int j = 0; j < g; ++j)
      for (int k = 0; k < g; ++k) {
        if (j == k) continue;
        rhs += (variant == Variant::i)
                   ? 2.0 * in.theta_e(j, k).log_normed - in.theta_f(j, k).log_normed
                   : 2.0 * in.theta_g(j).log_normed - in.theta_h(j, k).log_normed;
      }
  }
  set_sides(r, cplx(lhs), cplx(rhs));
  return r;
}

IdentityReport verify_thm1(const HyperellipticCurve& curve, const PeriodData& pd, Variant variant,
                           const std::vector<SurfacePoint>& p, const SurfacePoint& q, double eps,
                           PointSign sign) {
  const IdentityInputs in(curve, pd, p, q, eps, generic_threshold(pd.tau, eps));
  IdentityReport r = verify_thm1(in, variant, sign);
  r.digest.curve_hash = curve_hash(curve);
  return r;
}

IdentityReport verify_cor_products(const HyperellipticCurve& curve, const PeriodData& pd,
                                   const std::vector<SurfacePoint>& p, const SurfacePoint& q,
                                   double eps) {
  const IdentityInputs in(curve, pd, p, q, eps, generic_threshold(pd.tau, eps));
  IdentityReport r = verify_cor_products(in);
  r.digest.curve_hash = curve_hash(curve);
  return r;
}

IdentityReport verify_normed(const HyperellipticCurve& curve, const PeriodData& pd,
                             Variant variant, const std::vector<SurfacePoint>& p,
                             const SurfacePoint& q, double eps) {
  const IdentityInputs in(curve, pd, p, q, eps, generic_threshold(pd.tau, eps));
  IdentityReport r = verify_normed(in, variant);
  r.digest.curve_hash = curve_hash(curve);
  return r;
}

IdentityReport verify_thm2(const PeriodMatrix& tau, const std::vector<int>& sigma, double eps) {
  const int g = tau.genus();
  const FundamentalSystem fs = fundamental_system(g, sigma);
  IdentityReport r = make_report(IdentityId::thm2, g, eps);
  r.digest.sigma = sigma;
  const std::vector<Characteristic> odd(fs.chars.begin(), fs.chars.begin() + g);
  const cplx lhs = jacobian_nullwerte(tau, odd, eps);
  const Eigen::VectorXcd origin = Eigen::VectorXcd::Zero(g);
  cplx rhs = std::pow(pi, g);
  for (int k = g; k < 2 * g + 2; ++k) {
    const cplx t = theta(tau, fs.chars[k], origin, eps).value;
    if (!(std::abs(t) > 1e-12)) {
      throw Error(ErrorKind::numeric_failure, "even theta constant vanishes");
    }
    rhs *= t;
  }
  if (!(std::abs(lhs) > 0) || !std::isfinite(std::abs(lhs)) || !std::isfinite(std::abs(rhs))) {
    throw Error(ErrorKind::numeric_failure, "nullwerte determinant is zero or not finite");
  }
  const cplx ratio = lhs / rhs;
  if (std::abs(ratio.imag()) > 1e-4) {
    throw Error(ErrorKind::numeric_failure, "lhs/rhs is not real; refusing to assign a sign");
  }
  r.sign = ratio.real() >= 0 ? 1 : -1;
  const double top = std::max(std::log(std::abs(lhs)), std::log(std::abs(rhs)));
  r.log10_scale = std::floor(top / ln10);
  const double scale = std::pow(10.0, -r.log10_scale);
  r.lhs = lhs * scale;
  r.rhs = rhs * scale;
  r.rel_residual = std::abs(std::abs(lhs) / std::abs(rhs) - 1.0);
  return r;
}

IdentityReport verify_thm2(const HyperellipticCurve& curve, const PeriodData& pd,
                           const std::vector<int>& sigma, double eps) {
  IdentityReport r = verify_thm2(pd.tau, sigma, eps);
  r.digest.curve_hash = curve_hash(curve);
  return r;
}

IdentityReport jacobi_g1(cplx tau, double eps) {
  Eigen::MatrixXcd t(1, 1);
  t(0, 0) = tau;
  IdentityReport r = verify_thm2(PeriodMatrix(t), {1, 2, 3, 4}, eps);
  r.id = IdentityId::jacobi_g1;
  return r;
}

IdentityReport rosenhain_g2(const HyperellipticCurve& curve, const PeriodData& pd, double eps) {
  if (curve.genus() != 2) throw Error(ErrorKind::invalid_argument, "Rosenhain check needs genus 2");
  IdentityReport r = verify_thm2(curve, pd, {1, 2, 3, 4, 5, 6}, eps);
  r.id = IdentityId::rosenhain_g2;
  return r;
}

double default_threshold(IdentityId id, int genus) {
  switch (id) {
    case IdentityId::cor_products: return 1e-8;
    case IdentityId::jacobi_g1: return 1e-9;
    case IdentityId::thm2: return genus == 1 ? 1e-9 : 1e-6;
    default: return 1e-6;
  }
}

json to_json(const SuiteConfig& c) {
  json j;
  j["genus_min"] = c.genus_min;
  j["genus_max"] = c.genus_max;
  j["curves_per_genus"] = c.curves_per_genus;
  j["trials_per_curve"] = c.trials_per_curve;
  j["sigmas_per_genus"] = c.sigmas_per_genus;
  j["seed"] = c.seed;
  j["eps"] = format_double(c.eps);
  j["threshold"] = c.threshold ? json(format_double(*c.threshold)) : json(nullptr);
  return j;
}

SuiteResult run_suite(const SuiteConfig& config, const PeriodSource& period_source) {
  if (config.genus_min < 1 || config.genus_max > 4 || config.genus_min > config.genus_max) {
    throw Error(ErrorKind::invalid_argument, "genus range must lie within 1..4");
  }
  if (config.curves_per_genus < 1 || config.trials_per_curve < 0 || config.sigmas_per_genus < 1) {
    throw Error(ErrorKind::invalid_argument, "suite counts must be positive");
  }
  check_tolerance(config.eps);

  SuiteResult out;
  json reports = json::array();
  std::map<std::string, double> max_residuals;
  // "g<genus>" -> sigma text -> signs seen
  std::map<std::string, std::map<std::string, std::vector<int>>> signs;
  bool all_within = true;

  auto record = [&](IdentityReport r) {
    const double limit = config.threshold.value_or(default_threshold(r.id, r.genus));
    const bool ok = r.rel_residual <= limit;
    all_within = all_within && ok;
    json j = to_json(r);
    j["threshold"] = format_double(limit);
    j["pass"] = ok;
    reports.push_back(std::move(j));
    double& m = max_residuals[to_string(r.id)];
    m = std::max(m, r.rel_residual);
    if (r.id == IdentityId::thm2 && r.sign) {
      signs["g" + std::to_string(r.genus)][format_permutation(r.digest.sigma)].push_back(*r.sign);
    }
    out.reports.push_back(std::move(r));
  };
  auto fail = [&](int g, int curve, int trial, const std::string& what, const Error& e) {
    out.failures.push_back({{"genus", g},
                            {"curve", curve},
                            {"trial", trial},
                            {"stage", what},
                            {"kind", to_string(e.kind())},
                            {"message", e.what()}});
  };

  for (int g = config.genus_min; g <= config.genus_max; ++g) {
    const int n = 2 * g + 2;
    std::vector<std::vector<int>> sigmas;
    {
      Rng rng(derive_seed(config.seed, {1, static_cast<std::uint64_t>(g)}));
      std::vector<int> id(n);
      for (int i = 0; i < n; ++i) id[i] = i + 1;
      sigmas.push_back(id);
      for (int s = 1; s < config.sigmas_per_genus; ++s) {
        std::vector<int> perm = id;
        for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        sigmas.push_back(perm);
      }
    }
    for (int c = 0; c < config.curves_per_genus; ++c) {
      const std::uint64_t curve_seed =
          derive_seed(config.seed, {2, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(c)});
      const HyperellipticCurve curve = random_curve(g, curve_seed);
      const std::string hash = curve_hash(curve);
      std::optional<PeriodData> pd;
      try {
        pd = period_source ? period_source(curve, config.eps) : periods(curve, config.eps);
      } catch (const Error& e) {
        fail(g, c, -1, "periods", e);
        continue;
      }
      for (const auto& sigma : sigmas) {
        try {
          IdentityReport r = verify_thm2(pd->tau, sigma, config.eps);
          r.digest.curve_hash = hash;
          r.digest.seed = curve_seed;
          record(std::move(r));
        } catch (const Error& e) {
          fail(g, c, -1, "thm2 sigma=" + format_permutation(sigma), e);
        }
      }
      const double delta = generic_threshold(pd->tau, config.eps, curve_seed);
      for (int t = 0; t < config.trials_per_curve; ++t) {
        const std::uint64_t trial_seed = derive_seed(curve_seed, {3, static_cast<std::uint64_t>(t)});
        Rng rng(trial_seed);
        std::optional<IdentityInputs> in;
        std::optional<Error> last;
        for (int attempt = 0; attempt < 10 && !in; ++attempt) {
          std::vector<SurfacePoint> p;
          for (int k = 0; k < g; ++k) p.push_back(random_point(curve, rng));
          const SurfacePoint q = random_point(curve, rng);
          try {
            in.emplace(curve, *pd, p, q, config.eps, delta);
          } catch (const Error& e) {
            last = e;
            if (e.kind() != ErrorKind::generic_position) break;
          }
        }
        if (!in) {
          fail(g, c, t, "sampling", *last);
          continue;
        }
        auto stamp = [&](IdentityReport r) {
          r.digest.curve_hash = hash;
          r.digest.seed = trial_seed;
          r.digest.trial = t;
          record(std::move(r));
        };
        try {
          for (Variant v : {Variant::i, Variant::ii, Variant::iii}) stamp(verify_thm1(*in, v));
          stamp(verify_cor_products(*in));
          for (Variant v : {Variant::i, Variant::ii, Variant::iii}) stamp(verify_normed(*in, v));
        } catch (const Error& e) {
          fail(g, c, t, "identities", e);
        }
      }
    }
  }

  json sign_table = json::object();
  bool signs_consistent = true;
  for (const auto& [genus, table] : signs) {
    for (const auto& [sigma, seen] : table) {
      const bool same = std::all_of(seen.begin(), seen.end(), [&](int s) { return s == seen[0]; });
      signs_consistent = signs_consistent && same;
      sign_table[genus][sigma] = {{"sign", seen[0]}, {"consistent", same}, {"curves", seen.size()}};
    }
  }
  json max_json = json::object();
  for (const auto& [id, v] : max_residuals) max_json[id] = format_double(v);

  out.pass = all_within && signs_consistent && out.failures.empty() && !out.reports.empty();
  out.report = {{"schema", 1},
                {"config", to_json(config)},
                {"reports", std::move(reports)},
                {"failures", out.failures},
                {"max_residuals", std::move(max_json)},
                {"sign_table", std::move(sign_table)},
                {"pass", out.pass}};
  return out;
}

}  // namespace thetaforge
