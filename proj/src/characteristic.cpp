#include "thetaforge/characteristic.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "thetaforge/error.hpp"

namespace thetaforge {

namespace {

int floor_mod2(int v) { return ((v % 2) + 2) % 2; }

int doubled_or_throw(double v) {
  const double d = 2.0 * v;
  const double r = std::round(d);
  if (!std::isfinite(v) || std::abs(d - r) > 1e-12 || std::abs(r) > 1e9) {
    throw Error(ErrorKind::invalid_characteristic,
                "characteristic entry is not a multiple of 1/2");
  }
  return static_cast<int>(r);
}

int parse_entry(std::string_view s) {
  auto trim = [](std::string_view t) {
    while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
    while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
    return t;
  };
  s = trim(s);
  auto parse_int = [](std::string_view t, int& out) {
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size();
  };
  const auto slash = s.find('/');
  int num = 0;
  if (slash == std::string_view::npos) {
    if (!parse_int(s, num)) {
      throw Error(ErrorKind::invalid_characteristic,
                  "bad characteristic entry '" + std::string(s) + "'");
    }
    return 2 * num;
  }
  int den = 0;
  if (!parse_int(trim(s.substr(0, slash)), num) ||
      !parse_int(trim(s.substr(slash + 1)), den) || den == 0) {
    throw Error(ErrorKind::invalid_characteristic,
                "bad characteristic entry '" + std::string(s) + "'");
  }
  if (den == 1) return 2 * num;
  if (den == 2) return num;
  if (den == -2) return -num;
  throw Error(ErrorKind::invalid_characteristic,
              "characteristic entry '" + std::string(s) + "' is not a half-integer");
}

std::vector<int> parse_row(std::string_view row) {
  std::vector<int> out;
  while (true) {
    const auto comma = row.find(',');
    out.push_back(parse_entry(row.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    row.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_entry(int doubled) {
  if (doubled % 2 == 0) return std::to_string(doubled / 2);
  return std::to_string(doubled) + "/2";
}

}  // namespace

Characteristic::Characteristic(std::vector<int> top_doubled,
                               std::vector<int> bottom_doubled)
    : top_(std::move(top_doubled)), bottom_(std::move(bottom_doubled)) {
  if (top_.size() != bottom_.size() || top_.empty()) {
    throw Error(ErrorKind::dimension_mismatch,
                "characteristic rows must have equal positive length");
  }
}

Characteristic Characteristic::zero(int genus) {
  return Characteristic(std::vector<int>(genus, 0), std::vector<int>(genus, 0));
}

Characteristic Characteristic::from_values(const std::vector<double>& top,
                                           const std::vector<double>& bottom) {
  std::vector<int> t, b;
  for (double v : top) t.push_back(doubled_or_throw(v));
  for (double v : bottom) b.push_back(doubled_or_throw(v));
  return Characteristic(std::move(t), std::move(b));
}

Eigen::VectorXd Characteristic::top_vector() const {
  Eigen::VectorXd v(genus());
  for (int i = 0; i < genus(); ++i) v(i) = top(i);
  return v;
}

Eigen::VectorXd Characteristic::bottom_vector() const {
  Eigen::VectorXd v(genus());
  for (int i = 0; i < genus(); ++i) v(i) = bottom(i);
  return v;
}

bool Characteristic::is_canonical() const noexcept {
  for (int v : top_)
    if (v != 0 && v != 1) return false;
  for (int v : bottom_)
    if (v != 0 && v != 1) return false;
  return true;
}

Characteristic Characteristic::operator+(const Characteristic& other) const {
  if (genus() != other.genus()) {
    throw Error(ErrorKind::dimension_mismatch, "characteristic genus mismatch");
  }
  std::vector<int> t(top_), b(bottom_);
  for (int i = 0; i < genus(); ++i) {
    t[i] += other.top_[i];
    b[i] += other.bottom_[i];
  }
  return Characteristic(std::move(t), std::move(b));
}

ReducedCharacteristic reduce_characteristic(const Characteristic& alpha) {
  const int g = alpha.genus();
  std::vector<int> t(g), b(g);
  long exponent = 0;
  for (int i = 0; i < g; ++i) {
    t[i] = floor_mod2(alpha.top_doubled()[i]);
    b[i] = floor_mod2(alpha.bottom_doubled()[i]);
    const long n_bottom = (alpha.bottom_doubled()[i] - b[i]) / 2;
    exponent += static_cast<long>(t[i]) * n_bottom;
  }
  const int sign = (exponent % 2 == 0) ? 1 : -1;
  return {Characteristic(std::move(t), std::move(b)), sign};
}

Characteristic canonical(const Characteristic& alpha) {
  return reduce_characteristic(alpha).canonical;
}

Parity parity(const Characteristic& alpha) {
  long s = 0;
  for (int i = 0; i < alpha.genus(); ++i) {
    s += static_cast<long>(alpha.top_doubled()[i]) * alpha.bottom_doubled()[i];
  }
  return (s % 2 == 0) ? Parity::even : Parity::odd;
}

Characteristic parse_characteristic(std::string_view text) {
  const auto semi = text.find(';');
  if (semi == std::string_view::npos) {
    throw Error(ErrorKind::invalid_characteristic,
                "characteristic must look like 'a1,...,ag;b1,...,bg'");
  }
  auto top = parse_row(text.substr(0, semi));
  auto bottom = parse_row(text.substr(semi + 1));
  if (top.size() != bottom.size()) {
    throw Error(ErrorKind::invalid_characteristic,
                "characteristic rows have different lengths");
  }
  return Characteristic(std::move(top), std::move(bottom));
}

std::string format_characteristic(const Characteristic& alpha) {
  std::ostringstream out;
  for (int i = 0; i < alpha.genus(); ++i) {
    out << (i ? "," : "") << format_entry(alpha.top_doubled()[i]);
  }
  out << ';';
  for (int i = 0; i < alpha.genus(); ++i) {
    out << (i ? "," : "") << format_entry(alpha.bottom_doubled()[i]);
  }
  return out.str();
}

}  // namespace thetaforge
