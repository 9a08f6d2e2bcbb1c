#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thetaforge/determinants.hpp"
#include "thetaforge/hyperelliptic.hpp"

namespace thetaforge {

enum class IdentityId {
  thm1_i,
  thm1_ii,
  thm1_iii,
  cor_products,
  thm2,
  normed_i,
  normed_ii,
  normed_iii,
  jacobi_g1,
  rosenhain_g2,
};

const char* to_string(IdentityId id) noexcept;

enum class Variant { i, ii, iii };

Variant parse_variant(const std::string& text);

/// Reproducibility record attached to every report.
struct InputsDigest {
  std::string curve_hash;  ///< empty when the input was a bare period matrix
  std::uint64_t seed = 0;
  int trial = -1;
  std::vector<int> sigma;
  double eps = 0;
};

/// One evaluated identity. lhs and rhs are reported as
/// lhs_scaled * 10^log10_scale (same scale for both sides).
struct IdentityReport {
  IdentityId id = IdentityId::thm1_i;
  int genus = 0;
  cplx lhs;
  cplx rhs;
  double log10_scale = 0;
  double rel_residual = 0;
  std::optional<int> sign;
  InputsDigest digest;
};

nlohmann::json to_json(const IdentityReport& r);

/// Sign in front of the point identities (i) and (ii).
enum class PointSign {
  minus_one_pow_g,      ///< (-1)^g, the sign that holds numerically for all g
  minus_one_pow_binom,  ///< (-1)^binom(g+2,3), differs from the above at g = 3
};

/// Threshold below which a theta value counts as vanishing:
/// 1e-6 times the median ||theta|| over 100 random reduced points.
double generic_threshold(const PeriodMatrix& tau, double eps, std::uint64_t seed = 0);

/// All theta, J and eta values one point tuple p_1..p_g, q feeds into the
/// point identities. Every argument is an integer combination of one
/// Abel-Jacobi lift per point plus Delta, so quasi-periodicity factors
/// cancel exactly between the two sides.
class IdentityInputs {
 public:
  /// Throws generic_position when any theta argument has
  /// ||theta|| < delta_gen.
  IdentityInputs(const HyperellipticCurve& curve, const PeriodData& pd,
                 const std::vector<SurfacePoint>& p, const SurfacePoint& q, double eps,
                 double delta_gen);

  struct Value {
    cplx log;           ///< log of the plain value
    double log_normed;  ///< log of the normed value
  };

  int genus() const noexcept { return g_; }
  double eps() const noexcept { return eps_; }

  // indices are 0-based point indices
  const Value& theta_d() const { return theta_d_; }
  const Value& theta_e(int j, int k) const { return theta_e_.at(j * g_ + k); }  ///< D_j + p_k - q
  const Value& theta_f(int j, int k) const { return theta_f_.at(j * g_ + k); }  ///< D_j + p_k - p_j
  const Value& theta_g(int j) const { return theta_g_.at(j); }                  ///< g p_j - q
  const Value& theta_h(int j, int k) const { return theta_h_.at(j * g_ + k); }  ///< g p_j - p_k
  const Value& eta_d(int k) const { return eta_d_.at(k); }                      ///< eta(D_k)
  const Value& eta_k(int k) const { return eta_k_.at(k); }                      ///< eta((g-1) p_k)
  const Value& jacobian() const { return jacobian_; }                           ///< J(D_1..D_g)

 private:
  int g_ = 0;
  double eps_ = 0;
  Value theta_d_;
  std::vector<Value> theta_e_, theta_f_, theta_g_, theta_h_;
  std::vector<Value> eta_d_, eta_k_;
  Value jacobian_;
};

IdentityReport verify_thm1(const IdentityInputs& in, Variant variant,
                           PointSign sign = PointSign::minus_one_pow_g);
IdentityReport verify_cor_products(const IdentityInputs& in);
IdentityReport verify_normed(const IdentityInputs& in, Variant variant);

/// Convenience overloads that build the inputs (delta_gen computed from tau).
IdentityReport verify_thm1(const HyperellipticCurve& curve, const PeriodData& pd, Variant variant,
                           const std::vector<SurfacePoint>& p, const SurfacePoint& q, double eps,
                           PointSign sign = PointSign::minus_one_pow_g);
IdentityReport verify_cor_products(const HyperellipticCurve& curve, const PeriodData& pd,
                                   const std::vector<SurfacePoint>& p, const SurfacePoint& q,
                                   double eps);
IdentityReport verify_normed(const HyperellipticCurve& curve, const PeriodData& pd,
                             Variant variant, const std::vector<SurfacePoint>& p,
                             const SurfacePoint& q, double eps);

/// Nullwerte identity for the fundamental system of sigma. The residual is
/// | |lhs|/|rhs| - 1 | and sign = round(Re(lhs/rhs)).
IdentityReport verify_thm2(const PeriodMatrix& tau, const std::vector<int>& sigma, double eps);
IdentityReport verify_thm2(const HyperellipticCurve& curve, const PeriodData& pd,
                           const std::vector<int>& sigma, double eps);
IdentityReport jacobi_g1(cplx tau, double eps);
IdentityReport rosenhain_g2(const HyperellipticCurve& curve, const PeriodData& pd, double eps);

/// Default acceptance threshold for a report.
double default_threshold(IdentityId id, int genus);

struct SuiteConfig {
  int genus_min = 1;
  int genus_max = 3;
  int curves_per_genus = 3;
  int trials_per_curve = 5;
  int sigmas_per_genus = 4;  ///< identity plus random permutations
  std::uint64_t seed = 1;
  double eps = 1e-12;
  std::optional<double> threshold;  ///< overrides every default threshold
};

nlohmann::json to_json(const SuiteConfig& c);

struct SuiteResult {
  std::vector<IdentityReport> reports;
  nlohmann::json failures = nlohmann::json::array();
  nlohmann::json report;  ///< full aggregate document
  bool pass = false;
};

using PeriodSource = std::function<PeriodData(const HyperellipticCurve&, double)>;

/// Deterministic for a given config. Failed trials are recorded in
/// failures and make the suite fail; they do not abort it.
/// period_source, when given, supplies periods (e.g. through a cache).
SuiteResult run_suite(const SuiteConfig& config, const PeriodSource& period_source = {});

}  // namespace thetaforge
