#include "thetaforge/curve_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "thetaforge/error.hpp"

namespace thetaforge {

using nlohmann::json;

namespace {

json matrix_part(const Eigen::MatrixXcd& m, bool imag) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out.push_back(format_double(imag ? m(i, j).imag() : m(i, j).real()));
  return out;
}

Eigen::MatrixXcd read_matrix(const json& re, const json& im, Eigen::Index rows, Eigen::Index cols) {
  if (!re.is_array() || !im.is_array() || re.size() != static_cast<std::size_t>(rows * cols) ||
      im.size() != re.size()) {
    throw Error(ErrorKind::invalid_argument, "period cache array has the wrong size");
  }
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const std::size_t k = static_cast<std::size_t>(i * cols + j);
      m(i, j) = cplx(parse_double(re.at(k).get<std::string>()),
                     parse_double(im.at(k).get<std::string>()));
    }
  return m;
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string(what) + " is not valid JSON: " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  double v = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+' && end - begin > 1 && begin[1] != '-') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (begin == end || ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::invalid_argument, "bad decimal '" + text + "'");
  }
  return v;
}

std::string curve_to_json(const HyperellipticCurve& curve) {
  json pts = json::array();
  for (double a : curve.branch_points()) pts.push_back(format_double(a));
  json j;
  j["schema"] = 1;
  j["genus"] = curve.genus();
  j["branch_points"] = pts;
  return j.dump() + "\n";
}

HyperellipticCurve curve_from_json(const std::string& text) {
  const json j = parse_json(text, "curve file");
  try {
    if (j.at("schema").get<int>() != 1) {
      throw Error(ErrorKind::invalid_argument, "unsupported curve schema");
    }
    std::vector<double> pts;
    for (const auto& p : j.at("branch_points")) {
      pts.push_back(p.is_string() ? parse_double(p.get<std::string>()) : p.get<double>());
    }
    HyperellipticCurve curve = new_curve(std::move(pts));
    if (j.contains("genus") && j.at("genus").get<int>() != curve.genus()) {
      throw Error(ErrorKind::wrong_degree, "genus field disagrees with the branch points");
    }
    return curve;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed curve file: ") + e.what());
  }
}

std::string curve_hash(const HyperellipticCurve& curve) {
  const std::string bytes = curve_to_json(curve);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::numeric_failure, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string period_cache_to_json(const HyperellipticCurve& curve, const PeriodData& pd) {
  json j;
  j["schema"] = 1;
  j["curve_hash"] = curve_hash(curve);
  j["eps"] = format_double(pd.eps);
  j["tau_re"] = matrix_part(pd.tau.tau(), false);
  j["tau_im"] = matrix_part(pd.tau.tau(), true);
  j["A_re"] = matrix_part(pd.a_periods, false);
  j["A_im"] = matrix_part(pd.a_periods, true);
  j["delta_re"] = matrix_part(pd.riemann_shift, false);
  j["delta_im"] = matrix_part(pd.riemann_shift, true);
  j["b_orientation"] = pd.b_orientation;
  return j.dump(2) + "\n";
}

PeriodData period_cache_from_json(const HyperellipticCurve& curve, const std::string& text) {
  const json j = parse_json(text, "period cache");
  try {
    if (j.at("schema").get<int>() != 1) {
      throw Error(ErrorKind::invalid_argument, "unsupported period cache schema");
    }
    if (j.at("curve_hash").get<std::string>() != curve_hash(curve)) {
      throw Error(ErrorKind::invalid_argument, "period cache belongs to a different curve");
    }
    const int g = curve.genus();
    const Eigen::MatrixXcd tau = read_matrix(j.at("tau_re"), j.at("tau_im"), g, g);
    const Eigen::MatrixXcd a = read_matrix(j.at("A_re"), j.at("A_im"), g, g);
    const Eigen::VectorXcd delta = read_matrix(j.at("delta_re"), j.at("delta_im"), g, 1);
    const int orientation = j.value("b_orientation", 1);
    const double eps = parse_double(j.at("eps").get<std::string>());
    return period_data_from(curve, a, tau, orientation, delta, eps);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed period cache: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_argument, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  const fs::path tmp = path.string() + ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::invalid_argument, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::invalid_argument, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::invalid_argument, "cannot rename into " + path.string());
  }
}

std::filesystem::path PeriodCache::path_for(const HyperellipticCurve& curve) const {
  return dir_ / (curve_hash(curve) + ".json");
}

std::optional<PeriodData> PeriodCache::load(const HyperellipticCurve& curve, double eps) const {
  const auto path = path_for(curve);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    PeriodData pd = period_cache_from_json(curve, read_file(path));
    if (pd.eps > eps) return std::nullopt;
    return pd;
  } catch (const Error&) {
    // unreadable or stale entries are recomputed and overwritten
    return std::nullopt;
  }
}

void PeriodCache::store(const HyperellipticCurve& curve, const PeriodData& pd) const {
  atomic_write(path_for(curve), period_cache_to_json(curve, pd));
}

PeriodData periods_cached(const HyperellipticCurve& curve, double eps, const PeriodCache* cache) {
  if (cache) {
    if (auto hit = cache->load(curve, eps)) return *hit;
  }
  PeriodData pd = periods(curve, eps);
  if (cache) cache->store(curve, pd);
  return pd;
}

}  // namespace thetaforge
