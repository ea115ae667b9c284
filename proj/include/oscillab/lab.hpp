// Driver layer: sweep configuration, the built-in symbol gallery, the
// cross-module identity suite, and decomposition runs with verification.
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oscillab/criteria.hpp"
#include "oscillab/dyadic_sets.hpp"

namespace oscillab {

/// Invalid or out-of-range configuration (CLI exit code 4).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SweepConfig {
  nlohmann::json symbol;
  std::vector<std::string> criteria;
  SweepOptions options;
  std::string csv_path;
  std::string json_path;
  std::string svg_path;  // optional profile plot
  unsigned workers = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError on unknown keys, missing fields or out-of-range values.
  static SweepConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Pretty-printed JSON; parse(serialize()) reproduces the same bytes.
  std::string serialize() const;
  void validate() const;
};

struct SweepResult {
  std::vector<CriterionProfile> profiles;
  VerdictReport report;
  std::string csv;
  std::string json;  // verdict report plus run metadata
};

/// Computes every requested profile and the verdict; writes the configured
/// output files when their paths are non-empty.
SweepResult run_sweep(const SweepConfig& config);

enum class Expected { compact, non_compact };
std::string to_string(Expected e);

struct GalleryEntry {
  std::string name;  // file-system safe identifier
  Symbol symbol;
  Expected expected;
  std::string note;  // why the expectation holds
};

std::vector<GalleryEntry> builtin_gallery();

/// Every criterion the gallery evaluates.
std::vector<CriterionKind> gallery_kinds();

struct GalleryRow {
  GalleryEntry entry;
  std::vector<CriterionProfile> profiles;
  VerdictReport report;
  bool matches;
};

struct GalleryResult {
  std::vector<GalleryRow> rows;
  std::string summary_csv;
  bool all_match() const;
  bool any_inconsistent() const;
  int exit_code() const;  // 0, 2 on mismatch, 3 on inconsistency
};

SweepOptions gallery_options(int depth);

/// Runs the gallery; when `out_dir` is non-empty writes summary.csv, and per
/// entry <name>.csv, <name>.json and <name>.svg.
GalleryResult run_gallery(int depth, const std::filesystem::path& out_dir, const SweepOptions& options);
GalleryResult run_gallery(int depth, const std::filesystem::path& out_dir);

/// Decomposition of an arc set with a verification block.
/// mode "density" ignores lambda; mode "wik" requires it.
nlohmann::json run_decompose(const nlohmann::json& arc_set, const std::string& mode, const std::string& lambda);

struct IdentityRow {
  std::string symbol;
  Complex a;
  double direct;   // ||.||^2 from transported samples
  double poisson;  // from the rho^2-Poisson integral
  double taylor;   // from the Taylor coefficients of the composite
  std::size_t n;
  std::size_t terms;
  double spread() const;
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  double tolerance;
  bool ok() const;
  nlohmann::json to_json() const;
};

/// Three routes to ||sigma_{phi(a)} o phi o sigma_a||^2 for every gallery symbol at
/// `count` random a with |a| <= 1 - 2^{-10}; quadrature starts at N = n0.
IdentityReport run_identities(std::size_t n0 = 4096, int count = 20, std::uint64_t seed = 1, double tolerance = 1e-8);

/// Minimal SVG line plot of the profiles.
std::string profiles_svg(const std::vector<CriterionProfile>& profiles, const std::string& title);

}  // namespace oscillab
