#include "thetaforge/cli.hpp"

#include <cstdlib>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "thetaforge/charsys.hpp"
#include "thetaforge/curve_io.hpp"
#include "thetaforge/error.hpp"
#include "thetaforge/theta.hpp"
#include "thetaforge/verifier.hpp"

namespace thetaforge {

using nlohmann::json;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::numeric_failure:
    case ErrorKind::path_failure:
    case ErrorKind::generic_position:
      return exit_code::numeric;
    default:
      return exit_code::usage;
  }
}

std::string fmt(double v) { return format_double(v); }

std::string fmt(cplx v) {
  std::ostringstream o;
  o << format_double(v.real()) << (std::signbit(v.imag()) ? " - " : " + ")
    << format_double(std::abs(v.imag())) << "i";
  return o.str();
}

struct Options {
  double eps = 1e-12;
  std::uint64_t seed = 1;
  int genus = 2;
  std::string curve_file;
  std::string json_path;
  std::string cache_dir;
  bool no_cache = false;
  std::string tau_text;
  std::string sigma_text;
  std::string variant = "i";
  std::string char_text;
  std::string z_text;
  int order = 0;
  std::optional<double> threshold;
  int genus_min = 1;
  int genus_max = 3;
  int curves = 3;
  int trials = 5;
  int sigmas = 4;
};

class Runner {
 public:
  Runner(Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

  void check_common() const {
    if (!(o_.eps >= 1e-13 && o_.eps <= 1e-3)) {
      throw Error(ErrorKind::invalid_tolerance, "--eps must lie in [1e-13, 1e-3]");
    }
  }

  void check_genus(int g) const {
    if (g < 1 || g > 4) throw Error(ErrorKind::invalid_argument, "genus must lie in 1..4");
  }

  std::optional<PeriodCache> cache() const {
    if (o_.no_cache) return std::nullopt;
    std::string dir = o_.cache_dir;
    if (dir.empty()) {
      if (const char* env = std::getenv("THETAFORGE_CACHE_DIR"); env && *env) dir = env;
    }
    if (dir.empty()) {
      const char* home = std::getenv("HOME");
      if (!home || !*home) return std::nullopt;
      dir = std::string(home) + "/.cache/thetaforge";
    }
    return PeriodCache(dir);
  }

  HyperellipticCurve curve() const {
    if (!o_.curve_file.empty()) return curve_from_json(read_file(o_.curve_file));
    check_genus(o_.genus);
    return random_curve(o_.genus, o_.seed);
  }

  PeriodData periods_for(const HyperellipticCurve& c) const {
    const auto pc = cache();
    return periods_cached(c, o_.eps, pc ? &*pc : nullptr);
  }

  void emit_json(const json& j) const {
    if (o_.json_path.empty()) return;
    if (o_.json_path == "-") {
      out_ << j.dump(2) << "\n";
    } else {
      atomic_write(o_.json_path, j.dump(2) + "\n");
    }
  }

  int report(const IdentityReport& r) const {
    const double limit = o_.threshold.value_or(default_threshold(r.id, r.genus));
    const bool ok = r.rel_residual <= limit;
    out_ << "identity      " << to_string(r.id) << "\n"
         << "genus         " << r.genus << "\n"
         << "lhs           " << fmt(r.lhs) << " x 10^" << r.log10_scale << "\n"
         << "rhs           " << fmt(r.rhs) << " x 10^" << r.log10_scale << "\n"
         << "rel_residual  " << fmt(r.rel_residual) << "\n";
    if (r.sign) out_ << "sign          " << (*r.sign > 0 ? "+1" : "-1") << "\n";
    out_ << "threshold     " << fmt(limit) << "\n"
         << "result        " << (ok ? "PASS" : "FAIL") << "\n";
    json j = to_json(r);
    j["threshold"] = fmt(limit);
    j["pass"] = ok;
    emit_json(j);
    return ok ? exit_code::ok : exit_code::verification_failed;
  }

  int curve_gen() const {
    check_genus(o_.genus);
    const auto c = random_curve(o_.genus, o_.seed);
    const std::string text = curve_to_json(c);
    if (o_.json_path.empty() || o_.json_path == "-") {
      out_ << text;
    } else {
      atomic_write(o_.json_path, text);
      out_ << "wrote " << o_.json_path << " (genus " << c.genus() << ")\n";
    }
    return exit_code::ok;
  }

  int curve_show() const {
    if (o_.curve_file.empty()) throw Error(ErrorKind::invalid_argument, "--curve is required");
    const auto c = curve();
    out_ << "genus  " << c.genus() << "\n"
         << "hash   " << curve_hash(c) << "\n";
    for (int k = 1; k <= 2 * c.genus() + 2; ++k) {
      out_ << "a_" << k << std::string(k < 10 ? 4 : 3, ' ') << fmt(c.branch_point(k)) << "\n";
    }
    return exit_code::ok;
  }

  int periods_cmd() const {
    check_common();
    const auto c = curve();
    const auto pc = cache();
    const bool hit = pc && pc->load(c, o_.eps).has_value();
    const PeriodData pd = periods_cached(c, o_.eps, pc ? &*pc : nullptr);
    const int g = c.genus();
    out_ << "genus " << g << "  cache " << (pc ? (hit ? "hit" : "miss") : "off") << "\n";
    out_ << "tau\n";
    for (int j = 0; j < g; ++j) {
      out_ << " ";
      for (int k = 0; k < g; ++k) out_ << "  " << fmt(pd.tau.tau()(j, k));
      out_ << "\n";
    }
    out_ << "delta\n";
    for (int j = 0; j < g; ++j) out_ << "  " << fmt(pd.riemann_shift(j)) << "\n";
    emit_json(json::parse(period_cache_to_json(c, pd)));
    return exit_code::ok;
  }

  int theta_cmd() const {
    check_common();
    std::optional<PeriodMatrix> tau;
    if (!o_.tau_text.empty()) {
      tau.emplace(parse_complex_matrix(o_.tau_text));
    } else {
      tau.emplace(periods_for(curve()).tau);
    }
    const int g = tau->genus();
    const Characteristic alpha =
        o_.char_text.empty() ? Characteristic::zero(g) : parse_characteristic(o_.char_text);
    const Eigen::VectorXcd z =
        o_.z_text.empty() ? Eigen::VectorXcd(Eigen::VectorXcd::Zero(g)) : parse_complex_vector(o_.z_text);
    if (o_.order < 0 || o_.order > 2) throw Error(ErrorKind::invalid_argument, "--order must be 0, 1 or 2");
    const ThetaJet jet = theta_jet(*tau, alpha, z, o_.eps, o_.order);
    out_ << "characteristic  " << format_characteristic(alpha) << "\n"
         << "value           " << fmt(jet.value) << "   (err <= " << fmt(jet.value_error) << ")\n";
    json j;
    j["characteristic"] = format_characteristic(alpha);
    j["value"] = {{"re", fmt(jet.value.real())}, {"im", fmt(jet.value.imag())}, {"err", fmt(jet.value_error)}};
    j["lattice_points"] = jet.lattice_points;
    if (o_.order >= 1) {
      j["gradient"] = json::array();
      for (int k = 0; k < g; ++k) {
        out_ << "d/dz_" << k + 1 << "          " << fmt(jet.gradient(k)) << "   (err <= "
             << fmt(jet.gradient_error) << ")\n";
        j["gradient"].push_back({{"re", fmt(jet.gradient(k).real())},
                                 {"im", fmt(jet.gradient(k).imag())},
                                 {"err", fmt(jet.gradient_error)}});
      }
    }
    if (o_.order >= 2) {
      j["hessian"] = json::array();
      for (int a = 0; a < g; ++a) {
        json row = json::array();
        for (int b = 0; b < g; ++b) {
          if (b >= a) {
            out_ << "d2/dz_" << a + 1 << "dz_" << b + 1 << "      " << fmt(jet.hessian(a, b))
                 << "   (err <= " << fmt(jet.hessian_error) << ")\n";
          }
          row.push_back({{"re", fmt(jet.hessian(a, b).real())},
                         {"im", fmt(jet.hessian(a, b).imag())},
                         {"err", fmt(jet.hessian_error)}});
        }
        j["hessian"].push_back(row);
      }
    }
    emit_json(j);
    return exit_code::ok;
  }

  int verify_points(const std::string& which) const {
    check_common();
    const auto c = curve();
    const PeriodData pd = periods_for(c);
    const int g = c.genus();
    const double delta = generic_threshold(pd.tau, o_.eps, o_.seed);
    Rng rng(o_.seed);
    std::optional<IdentityInputs> in;
    for (int attempt = 0; attempt < 10 && !in; ++attempt) {
      std::vector<SurfacePoint> p;
      for (int k = 0; k < g; ++k) p.push_back(random_point(c, rng));
      const SurfacePoint q = random_point(c, rng);
      try {
        in.emplace(c, pd, p, q, o_.eps, delta);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::generic_position || attempt == 9) throw;
      }
    }
    IdentityReport r;
    if (which == "thm1") {
      r = verify_thm1(*in, parse_variant(o_.variant));
    } else if (which == "normed") {
      r = verify_normed(*in, parse_variant(o_.variant));
    } else {
      r = verify_cor_products(*in);
    }
    r.digest.curve_hash = curve_hash(c);
    r.digest.seed = o_.seed;
    return report(r);
  }

  int verify_thm2_cmd() const {
    check_common();
    IdentityReport r;
    if (!o_.tau_text.empty()) {
      const PeriodMatrix tau(parse_complex_matrix(o_.tau_text));
      r = verify_thm2(tau, sigma_or_identity(tau.genus()), o_.eps);
    } else {
      const auto c = curve();
      r = verify_thm2(c, periods_for(c), sigma_or_identity(c.genus()), o_.eps);
    }
    return report(r);
  }

  int verify_jacobi_cmd() const {
    check_common();
    const Eigen::MatrixXcd t = parse_complex_matrix(o_.tau_text.empty() ? "1i" : o_.tau_text);
    if (t.rows() != 1 || t.cols() != 1) {
      throw Error(ErrorKind::invalid_argument, "jacobi needs a 1x1 period matrix");
    }
    return report(jacobi_g1(t(0, 0), o_.eps));
  }

  int verify_rosenhain_cmd() const {
    check_common();
    HyperellipticCurve c = o_.curve_file.empty() ? random_curve(2, o_.seed) : curve();
    return report(rosenhain_g2(c, periods_for(c), o_.eps));
  }

  int suite_cmd() const {
    check_common();
    SuiteConfig cfg;
    cfg.genus_min = o_.genus_min;
    cfg.genus_max = o_.genus_max;
    check_genus(cfg.genus_min);
    check_genus(cfg.genus_max);
    cfg.curves_per_genus = o_.curves;
    cfg.trials_per_curve = o_.trials;
    cfg.sigmas_per_genus = o_.sigmas;
    cfg.seed = o_.seed;
    cfg.eps = o_.eps;
    cfg.threshold = o_.threshold;
    const auto pc = cache();
    PeriodSource source;
    if (pc) {
      source = [&pc](const HyperellipticCurve& c, double eps) { return periods_cached(c, eps, &*pc); };
    }
    const SuiteResult res = run_suite(cfg, source);
    out_ << std::left << std::setw(16) << "identity" << "max_residual\n";
    for (const auto& [id, v] : res.report["max_residuals"].items()) {
      out_ << std::setw(16) << id << v.get<std::string>() << "\n";
    }
    out_ << "reports   " << res.reports.size() << "\n"
         << "failures  " << res.failures.size() << "\n"
         << "result    " << (res.pass ? "PASS" : "FAIL") << "\n";
    for (const auto& f : res.failures) err_ << "failure: " << f.dump() << "\n";
    emit_json(res.report);
    return res.pass ? exit_code::ok : exit_code::verification_failed;
  }

 private:
  std::vector<int> sigma_or_identity(int g) const {
    if (!o_.sigma_text.empty()) return parse_permutation(o_.sigma_text);
    std::vector<int> id(2 * g + 2);
    for (int i = 0; i < 2 * g + 2; ++i) id[i] = i + 1;
    return id;
  }

  Options& o_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

cplx parse_complex(const std::string& raw) {
  std::string s;
  for (char ch : raw)
    if (ch != ' ') s.push_back(ch);
  auto bad = [&]() { return Error(ErrorKind::invalid_argument, "bad complex number '" + raw + "'"); };
  if (s.empty()) throw bad();
  auto number = [&](const std::string& t) -> double {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    try {
      return parse_double(t);
    } catch (const Error&) {
      throw bad();
    }
  };
  if (s.back() != 'i' && s.back() != 'j') {
    try {
      return {parse_double(s), 0.0};
    } catch (const Error&) {
      throw bad();
    }
  }
  s.pop_back();
  std::size_t split_at = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  if (split_at == std::string::npos) return {0.0, number(s)};
  const std::string re = s.substr(0, split_at);
  try {
    return {parse_double(re), number(s.substr(split_at))};
  } catch (const Error&) {
    throw bad();
  }
}

Eigen::MatrixXcd parse_complex_matrix(const std::string& text) {
  const auto rows = split(text, ';');
  std::vector<std::vector<cplx>> cells;
  for (const auto& r : rows) {
    std::vector<cplx> row;
    for (const auto& e : split(r, ',')) row.push_back(parse_complex(e));
    cells.push_back(std::move(row));
  }
  const std::size_t n = cells.size();
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (cells[i].size() != n) throw Error(ErrorKind::dimension_mismatch, "matrix must be square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = cells[i][j];
  }
  return m;
}

Eigen::VectorXcd parse_complex_vector(const std::string& text) {
  const auto items = split(text, ',');
  Eigen::VectorXcd v(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) v(i) = parse_complex(items[i]);
  return v;
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  Runner run(o, out, err);
  CLI::App app{"Riemann theta functions on hyperelliptic Jacobians and identity checks", "thetaforge"};
  app.require_subcommand(1);
  std::function<int()> action;

  auto add_eps = [&](CLI::App* c) { c->add_option("--eps", o.eps, "absolute truncation tolerance"); };
  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "random seed"); };
  auto add_json = [&](CLI::App* c) { c->add_option("--json", o.json_path, "write JSON here ('-' for stdout)"); };
  auto add_cache = [&](CLI::App* c) {
    c->add_option("--cache-dir", o.cache_dir, "period cache directory");
    c->add_flag("--no-cache", o.no_cache, "do not read or write the period cache");
  };
  auto add_curve = [&](CLI::App* c) {
    c->add_option("--curve", o.curve_file, "curve JSON file");
    c->add_option("--genus", o.genus, "genus of the random curve used without --curve");
  };

  auto* curve = app.add_subcommand("curve", "generate or inspect curve files");
  curve->require_subcommand(1);
  auto* gen = curve->add_subcommand("gen", "random curve with branch points in [-2, 2]");
  gen->add_option("--genus", o.genus, "genus (1..4)");
  add_seed(gen);
  add_json(gen);
  gen->callback([&] { action = [&] { return run.curve_gen(); }; });
  auto* show = curve->add_subcommand("show", "print a curve file");
  show->add_option("--curve", o.curve_file, "curve JSON file");
  show->callback([&] { action = [&] { return run.curve_show(); }; });

  auto* per = app.add_subcommand("periods", "period matrix and calibration of a curve");
  add_curve(per);
  add_seed(per);
  add_eps(per);
  add_json(per);
  add_cache(per);
  per->callback([&] { action = [&] { return run.periods_cmd(); }; });

  auto* th = app.add_subcommand("theta", "evaluate theta[alpha](z) and derivatives");
  th->add_option("--tau", o.tau_text, "period matrix, rows ';' entries ',' e.g. \"1i\"");
  add_curve(th);
  add_seed(th);
  th->add_option("--char", o.char_text, "characteristic 'a1,..;b1,..'");
  th->add_option("--z", o.z_text, "point, entries separated by ','");
  th->add_option("--order", o.order, "derivative order 0, 1 or 2");
  add_eps(th);
  add_json(th);
  add_cache(th);
  th->callback([&] { action = [&] { return run.theta_cmd(); }; });

  auto* ver = app.add_subcommand("verify", "check one identity");
  ver->require_subcommand(1);
  for (const char* name : {"thm1", "cor", "normed"}) {
    auto* v = ver->add_subcommand(name, std::string("point identity ") + name);
    add_curve(v);
    add_seed(v);
    add_eps(v);
    add_json(v);
    add_cache(v);
    v->add_option("--threshold", o.threshold, "residual threshold");
    if (std::string(name) != "cor") v->add_option("--variant", o.variant, "i, ii or iii");
    const std::string which = name;
    v->callback([&, which] { action = [&, which] { return run.verify_points(which); }; });
  }
  auto* t2 = ver->add_subcommand("thm2", "nullwerte identity for a fundamental system");
  add_curve(t2);
  add_seed(t2);
  add_eps(t2);
  add_json(t2);
  add_cache(t2);
  t2->add_option("--tau", o.tau_text, "period matrix instead of a curve");
  t2->add_option("--sigma", o.sigma_text, "permutation 'c1,c2,...'");
  t2->add_option("--threshold", o.threshold, "residual threshold");
  t2->callback([&] { action = [&] { return run.verify_thm2_cmd(); }; });
  auto* jac = ver->add_subcommand("jacobi", "genus-1 case at a given tau");
  jac->add_option("--tau", o.tau_text, "tau, e.g. \"0.2+1.1i\"");
  add_eps(jac);
  add_json(jac);
  jac->add_option("--threshold", o.threshold, "residual threshold");
  jac->callback([&] { action = [&] { return run.verify_jacobi_cmd(); }; });
  auto* ros = ver->add_subcommand("rosenhain", "genus-2 case on a curve");
  ros->add_option("--curve", o.curve_file, "curve JSON file");
  add_seed(ros);
  add_eps(ros);
  add_json(ros);
  add_cache(ros);
  ros->add_option("--threshold", o.threshold, "residual threshold");
  ros->callback([&] { action = [&] { return run.verify_rosenhain_cmd(); }; });

  auto* suite = app.add_subcommand("suite", "run every identity over random curves");
  suite->add_option("--genus-min", o.genus_min, "smallest genus");
  suite->add_option("--genus-max", o.genus_max, "largest genus");
  suite->add_option("--curves", o.curves, "curves per genus");
  suite->add_option("--trials", o.trials, "point tuples per curve");
  suite->add_option("--sigmas", o.sigmas, "permutations per genus");
  suite->add_option("--threshold", o.threshold, "override every residual threshold");
  add_seed(suite);
  add_eps(suite);
  add_json(suite);
  add_cache(suite);
  suite->callback([&] { action = [&] { return run.suite_cmd(); }; });

  std::vector<const char*> argv{"thetaforge"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }
  try {
    return action ? action() : exit_code::usage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::numeric;
  }
}

}  // namespace thetaforge
