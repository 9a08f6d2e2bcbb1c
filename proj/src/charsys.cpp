#include "thetaforge/charsys.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <set>
#include <sstream>

#include "thetaforge/error.hpp"

namespace thetaforge {

namespace {

void check_genus(int genus) {
  if (genus < 1 || 2 * genus + 2 > 32) {
    throw Error(ErrorKind::invalid_argument, "genus out of range");
  }
}

std::uint32_t mask_of(int genus, const std::vector<int>& members) {
  check_genus(genus);
  std::uint32_t mask = 0;
  for (int k : members) {
    if (k < 1 || k > 2 * genus + 2) {
      throw Error(ErrorKind::invalid_argument, "index set member out of range");
    }
    mask |= 1u << (k - 1);
  }
  return mask;
}

}  // namespace

IndexSet::IndexSet(int genus, std::initializer_list<int> members)
    : IndexSet(genus, std::vector<int>(members)) {}

IndexSet::IndexSet(int genus, const std::vector<int>& members)
    : genus_(genus), mask_(mask_of(genus, members)) {}

IndexSet IndexSet::from_mask(int genus, std::uint32_t mask) {
  check_genus(genus);
  const int n = 2 * genus + 2;
  if (n < 32 && (mask >> n) != 0) {
    throw Error(ErrorKind::invalid_argument, "index set mask out of range");
  }
  IndexSet s;
  s.genus_ = genus;
  s.mask_ = mask;
  return s;
}

int IndexSet::size() const noexcept { return std::popcount(mask_); }

std::vector<int> IndexSet::members() const {
  std::vector<int> out;
  for (int k = 1; k <= 2 * genus_ + 2; ++k)
    if (contains(k)) out.push_back(k);
  return out;
}

IndexSet sym_diff(const IndexSet& s, const IndexSet& t) {
  if (s.genus() != t.genus()) {
    throw Error(ErrorKind::dimension_mismatch, "index sets belong to different genera");
  }
  return IndexSet::from_mask(s.genus(), s.mask() ^ t.mask());
}

IndexSet odd_set(int genus) {
  std::vector<int> m;
  for (int k = 1; k <= 2 * genus + 1; k += 2) m.push_back(k);
  return IndexSet(genus, m);
}

Characteristic base_characteristic(int genus, int k) {
  check_genus(genus);
  if (k < 1 || k > 2 * genus + 2) {
    throw Error(ErrorKind::invalid_argument, "base characteristic index out of range");
  }
  std::vector<int> top(genus, 0), bottom(genus, 0);
  if (k == 2 * genus + 2) return Characteristic(top, bottom);
  const int half = (k + 1) / 2;  // eta_{2h-1} or eta_{2h}
  if (half <= genus) top[half - 1] = 1;
  const int halves = (k % 2 == 1) ? half - 1 : half;
  for (int i = 0; i < halves; ++i) bottom[i] = 1;
  return Characteristic(top, bottom);
}

Characteristic characteristic_of_set(const IndexSet& s) {
  const int g = s.genus();
  Characteristic sum = Characteristic::zero(g);
  for (int k : s.members()) {
    if (k == 2 * g + 2) continue;
    sum = sum + base_characteristic(g, k);
  }
  return canonical(sum);
}

void check_permutation(int genus, const std::vector<int>& sigma) {
  check_genus(genus);
  const int n = 2 * genus + 2;
  if (static_cast<int>(sigma.size()) != n) {
    throw Error(ErrorKind::invalid_argument,
                "permutation must have " + std::to_string(n) + " entries");
  }
  std::vector<bool> seen(n + 1, false);
  for (int v : sigma) {
    if (v < 1 || v > n || seen[v]) {
      throw Error(ErrorKind::invalid_argument, "not a permutation of 1.." + std::to_string(n));
    }
    seen[v] = true;
  }
}

FundamentalSystem fundamental_system(int genus, const std::vector<int>& sigma) {
  check_permutation(genus, sigma);
  const std::vector<int> first(sigma.begin(), sigma.begin() + genus);
  const IndexSet t_sigma(genus, first);
  const IndexSet u = odd_set(genus);
  FundamentalSystem fs;
  fs.sigma = sigma;
  for (int k = 1; k <= 2 * genus + 2; ++k) {
    const IndexSet t_k = sym_diff(sym_diff(t_sigma, IndexSet(genus, {sigma[k - 1]})), u);
    fs.chars.push_back(characteristic_of_set(t_k));
  }
  return fs;
}

bool is_fundamental(const FundamentalSystem& fs) {
  if (fs.chars.empty()) return false;
  const int g = fs.chars.front().genus();
  if (static_cast<int>(fs.chars.size()) != 2 * g + 2) return false;
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  for (int k = 0; k < 2 * g + 2; ++k) {
    const auto& c = fs.chars[k];
    if (c.genus() != g) return false;
    const Parity want = (k < g) ? Parity::odd : Parity::even;
    if (parity(c) != want) return false;
    const auto canon = canonical(c);
    if (!seen.emplace(canon.top_doubled(), canon.bottom_doubled()).second) return false;
  }
  return true;
}

std::vector<int> parse_permutation(std::string_view text) {
  std::vector<int> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorKind::invalid_argument, "bad permutation entry '" + std::string(item) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw Error(ErrorKind::invalid_argument, "empty permutation");
  return out;
}

std::string format_permutation(const std::vector<int>& sigma) {
  std::ostringstream out;
  for (std::size_t i = 0; i < sigma.size(); ++i) out << (i ? "," : "") << sigma[i];
  return out.str();
}

}  // namespace thetaforge
