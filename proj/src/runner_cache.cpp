#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "ergonet/runner.hpp"

namespace ergonet::runner {

namespace fs = std::filesystem;

fs::path cache_root() {
  if (const char* env = std::getenv("ERGONET_CACHE_DIR")) return fs::path(env);
  if (const char* home = std::getenv("HOME")) return fs::path(home) / ".cache" / "ergonet";
  return fs::temp_directory_path() / "ergonet-cache";
}

namespace {

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw numeric_error("cannot write " + p.string());
  out << content;
}

}  // namespace

std::optional<CacheEntry> cache_lookup(const std::string& hash_hex) {
  const fs::path dir = cache_root() / hash_hex;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return std::nullopt;
  const fs::path meta_path = dir / "meta.json";
  try {
    std::ifstream in(meta_path);
    if (!in) return std::nullopt;
    const json meta = json::parse(in);
    if (!meta.value("complete", false)) return std::nullopt;
    for (const char* f : {"report.csv", "report.json", "plot.dat"})
      if (!fs::is_regular_file(dir / f, ec)) return std::nullopt;
    CacheEntry entry;
    entry.dir = dir;
    entry.exit_code = meta.value("exit_code", 0);
    return entry;
  } catch (const std::exception& e) {
    std::cerr << "ergonet: ignoring corrupt cache entry " << dir.string() << ": " << e.what()
              << "\n";
    return std::nullopt;
  }
}

void cache_store(const std::string& hash_hex, const Report& report, int exit_code) {
  const fs::path root = cache_root();
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) return;  // caching is best-effort
  const fs::path final_dir = root / hash_hex;
  if (fs::exists(final_dir, ec)) return;
  // write-then-rename so an interrupted run never leaves a partial entry
  const fs::path tmp = root / (hash_hex + ".tmp." + std::to_string(::getpid()));
  try {
    fs::create_directories(tmp);
    write_file(tmp / "report.csv", report.csv());
    write_file(tmp / "report.json", report.to_json().dump(2) + "\n");
    write_file(tmp / "plot.dat", report.plot_data());
    json meta;
    meta["complete"] = true;
    meta["exit_code"] = exit_code;
    meta["config_hash"] = hash_hex;
    write_file(tmp / "meta.json", meta.dump(2) + "\n");
    fs::rename(tmp, final_dir, ec);
    if (ec) fs::remove_all(tmp, ec);
  } catch (const std::exception&) {
    fs::remove_all(tmp, ec);
  }
}

}  // namespace ergonet::runner
