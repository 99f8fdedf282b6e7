#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ergonet/mean_ergodic.hpp"
#include "ergonet/uniform.hpp"

namespace ergonet::runner {

using json = nlohmann::json;

struct Tolerances {
  double rank_tol = 1e-8;
  double angle_tol = 1e-6;
  double zero_tol = 1e-8;
  double net_tol = 1e-3;  // net-convergence threshold; an artifact choice
  double quad_tol = 1e-9;
};

struct RunConfig {
  int version = 1;
  std::string subcommand;
  std::uint64_t seed = 0;
  Tolerances tol;
  json params;      // subcommand-specific payload
  json assertions;  // optional expected-outcome assertions
  std::string output_dir = "ergonet-out";
  json raw;         // full original document

  /// Validates against the shipped schema and the subcommand's semantic
  /// rules; throws contract_error with a pointer-anchored message.
  static RunConfig parse(const json& doc);
  static RunConfig load(const std::filesystem::path& path);
};

/// The JSON schema the configs are validated against (also shipped at
/// configs/schema.json and printed by `ergonet schema`).
const std::string& config_schema_text();

/// Canonical serialization of the config minus volatile fields (output dir).
std::string canonical_config_string(const json& doc);
std::string config_hash_hex(const json& doc);

// ---------------------------------------------------------------------------

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  using Cell = std::variant<double, std::int64_t, std::string, bool>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Verdict> verdicts;
  json meta;
  int plot_x = 0, plot_y = 1;

  bool all_pass() const;
  std::string csv() const;        // 17 significant digits, locale-free
  std::string plot_data() const;  // two whitespace-separated columns
  json to_json() const;
};

/// Pure execution: config in, report out (no filesystem access).
Report execute(const RunConfig& cfg, int jobs);

// ---------------------------------------------------------------------------

std::filesystem::path cache_root();  // ERGONET_CACHE_DIR override, else ~/.cache/ergonet

struct CacheEntry {
  std::filesystem::path dir;
  int exit_code = 0;
};
std::optional<CacheEntry> cache_lookup(const std::string& hash_hex);
void cache_store(const std::string& hash_hex, const Report& report, int exit_code);

struct RunResult {
  int exit_code = 0;
  bool from_cache = false;
  std::filesystem::path out_dir;
};

/// Full pipeline: load, hash, cache lookup, execute, write artifacts.
RunResult run(const std::filesystem::path& config_path,
              const std::optional<std::string>& out_override, int jobs, bool use_cache);

}  // namespace ergonet::runner
