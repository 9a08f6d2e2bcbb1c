#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "thetaforge/hyperelliptic.hpp"

namespace thetaforge {

/// %.17g, enough to round-trip any double.
std::string format_double(double v);
double parse_double(const std::string& text);

/// Canonical curve file bytes: {"schema":1,"genus":g,"branch_points":[...]}.
std::string curve_to_json(const HyperellipticCurve& curve);
HyperellipticCurve curve_from_json(const std::string& text);

/// Lowercase hex SHA-256 of curve_to_json(curve).
std::string curve_hash(const HyperellipticCurve& curve);

std::string period_cache_to_json(const HyperellipticCurve& curve, const PeriodData& pd);
/// Throws invalid_argument if the file belongs to a different curve.
PeriodData period_cache_from_json(const HyperellipticCurve& curve, const std::string& text);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over the target.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Period cache keyed by curve hash. A stored entry is reused only when it
/// was computed with a tolerance at least as tight as the request.
class PeriodCache {
 public:
  explicit PeriodCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_for(const HyperellipticCurve& curve) const;
  std::optional<PeriodData> load(const HyperellipticCurve& curve, double eps) const;
  void store(const HyperellipticCurve& curve, const PeriodData& pd) const;

 private:
  std::filesystem::path dir_;
};

/// Cached periods when available, else computed (and stored if cache set).
PeriodData periods_cached(const HyperellipticCurve& curve, double eps, const PeriodCache* cache);

}  // namespace thetaforge
