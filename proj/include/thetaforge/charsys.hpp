#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "thetaforge/characteristic.hpp"

namespace thetaforge {

/// Subset of {1, ..., 2g+2}, stored as a bitmask (bit k-1 for member k).
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(int genus, std::initializer_list<int> members);
  IndexSet(int genus, const std::vector<int>& members);

  static IndexSet from_mask(int genus, std::uint32_t mask);

  int genus() const noexcept { return genus_; }
  std::uint32_t mask() const noexcept { return mask_; }
  bool contains(int k) const noexcept { return k >= 1 && k <= 32 && ((mask_ >> (k - 1)) & 1u); }
  int size() const noexcept;
  std::vector<int> members() const;

  bool operator==(const IndexSet& other) const = default;

 private:
  int genus_ = 0;
  std::uint32_t mask_ = 0;
};

/// Symmetric difference; throws dimension_mismatch on differing genus.
IndexSet sym_diff(const IndexSet& s, const IndexSet& t);

/// U = {1, 3, ..., 2g+1}.
IndexSet odd_set(int genus);

/// eta_k, 1 <= k <= 2g+2, canonical.
Characteristic base_characteristic(int genus, int k);

/// eta_S = sum of eta_k over S without 2g+2, reduced mod 1.
Characteristic characteristic_of_set(const IndexSet& s);

struct FundamentalSystem {
  std::vector<Characteristic> chars;  ///< eta^sigma_1 .. eta^sigma_{2g+2}
  std::vector<int> sigma;             ///< sigma(1) .. sigma(2g+2)
};

/// Throws invalid_argument unless sigma is a permutation of 1..2g+2.
void check_permutation(int genus, const std::vector<int>& sigma);

FundamentalSystem fundamental_system(int genus, const std::vector<int>& sigma);

/// g odd characteristics followed by g+2 even ones, pairwise distinct mod 1.
bool is_fundamental(const FundamentalSystem& fs);

/// "c1,c2,...": 1-based one-line permutation notation.
std::vector<int> parse_permutation(std::string_view text);
std::string format_permutation(const std::vector<int>& sigma);

}  // namespace thetaforge
