#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace thetaforge {

/// Theta characteristic [top; bottom] with half-integer entries.
///
/// Entries are stored doubled (value = entry / 2) so that sums and mod-1
/// reduction are exact integer operations.
class Characteristic {
 public:
  Characteristic() = default;
  Characteristic(std::vector<int> top_doubled, std::vector<int> bottom_doubled);

  static Characteristic zero(int genus);
  /// Builds from real values; throws invalid_characteristic unless every
  /// entry is an integer multiple of 1/2.
  static Characteristic from_values(const std::vector<double>& top,
                                    const std::vector<double>& bottom);

  int genus() const noexcept { return static_cast<int>(top_.size()); }
  const std::vector<int>& top_doubled() const noexcept { return top_; }
  const std::vector<int>& bottom_doubled() const noexcept { return bottom_; }
  double top(int i) const { return 0.5 * top_.at(i); }
  double bottom(int i) const { return 0.5 * bottom_.at(i); }
  Eigen::VectorXd top_vector() const;
  Eigen::VectorXd bottom_vector() const;

  /// Every entry in {0, 1/2}.
  bool is_canonical() const noexcept;

  /// Exact entrywise sum (not reduced).
  Characteristic operator+(const Characteristic& other) const;
  bool operator==(const Characteristic& other) const = default;

 private:
  std::vector<int> top_;
  std::vector<int> bottom_;
};

struct ReducedCharacteristic {
  Characteristic canonical;
  int sign = 1;  ///< theta[alpha](z) = sign * theta[canonical](z)
};

ReducedCharacteristic reduce_characteristic(const Characteristic& alpha);

/// Canonical representative only (sign discarded).
Characteristic canonical(const Characteristic& alpha);

enum class Parity { even, odd };

/// Even iff 4 * top . bottom is even.
Parity parity(const Characteristic& alpha);

/// Parses "a1,...,ag;b1,...,bg" where entries are "0", "1/2", "1", "-3/2", ...
Characteristic parse_characteristic(std::string_view text);
std::string format_characteristic(const Characteristic& alpha);

}  // namespace thetaforge
