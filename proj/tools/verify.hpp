#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace matchkit::cli {

struct Check {
  std::string name;
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass() const { return max_residual <= tol; }
};

struct VerifyOptions {
  int samples = 1000;
  std::uint64_t seed = 42;
  /// Tolerance for the residuals that are zero up to round-off.
  double tol = 1e-8;
};

std::vector<Check> verify_matching(const VerifyOptions& opts);
std::vector<Check> verify_energy(const VerifyOptions& opts);
std::vector<Check> verify_characteristics(const VerifyOptions& opts);
std::vector<Check> verify_quartic(const VerifyOptions& opts);

/// Runs "matching", "energy", "characteristics", "quartic" or "all".
/// InvalidParameters for an unknown suite name.
std::vector<Check> run_suite(const std::string& suite, const VerifyOptions& opts);

nlohmann::json to_json(const std::vector<Check>& checks);

}  // namespace matchkit::cli
