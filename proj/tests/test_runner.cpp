#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ergonet/runner.hpp"

using namespace ergonet;
using namespace ergonet::runner;

namespace {

json minimal_config(const std::string& sub) {
  json j;
  j["version"] = 1;
  j["subcommand"] = sub;
  return j;
}

}  // namespace

TEST_CASE("config validation accepts the minimal document and rejects bad ones") {
  CHECK_NOTHROW(RunConfig::parse(minimal_config("ww")));

  json bad = minimal_config("ww");
  bad["tolerances"]["net_tol"] = -1.0;
  CHECK_THROWS_AS(RunConfig::parse(bad), contract_error);

  json bad2 = minimal_config("frobnicate");
  CHECK_THROWS_AS(RunConfig::parse(bad2), contract_error);

  json bad3 = minimal_config("ww");
  bad3["unknown_top_level"] = 1;
  CHECK_THROWS_AS(RunConfig::parse(bad3), contract_error);

  json bad4 = json::object();  // missing required keys
  CHECK_THROWS_AS(RunConfig::parse(bad4), contract_error);
}

TEST_CASE("schema text is valid JSON and matches what the validator enforces") {
  const json schema = json::parse(config_schema_text());
  CHECK(schema["properties"]["subcommand"]["enum"].size() == 5);
}

TEST_CASE("config hash ignores the output location and sees every tolerance") {
  json a = minimal_config("ww");
  a["params"]["experiment"] = "dirichlet";
  json b = a;
  b["output"]["dir"] = "somewhere/else";
  CHECK(config_hash_hex(a) == config_hash_hex(b));

  json c = a;
  c["tolerances"]["net_tol"] = 0.5;
  CHECK(config_hash_hex(a) != config_hash_hex(c));
}

TEST_CASE("report CSV is deterministic and 17-significant-digit formatted") {
  Report r;
  r.columns = {"x", "label", "flag"};
  r.rows.push_back({1.0 / 3.0, std::string("plain"), true});
  r.rows.push_back({1e-300, std::string("with,comma"), false});
  const std::string csv = r.csv();
  CHECK(csv == "x,label,flag\n0.33333333333333331,plain,true\n1e-300,\"with,comma\",false\n");
}

TEST_CASE("execute: equivalence ensemble is schedule-independent") {
  json doc = minimal_config("equivalence");
  doc["seed"] = 11;
  doc["params"]["ensemble"] = "contraction_2norm";
  doc["params"]["instances"] = 12;
  doc["params"]["dim_min"] = 3;
  doc["params"]["dim_max"] = 6;
  const RunConfig cfg = RunConfig::parse(doc);
  const Report r1 = execute(cfg, 1);
  const Report r8 = execute(cfg, 8);
  CHECK(r1.csv() == r8.csv());
  CHECK(r1.all_pass());
}

TEST_CASE("execute: ww dirichlet emits the documented columns") {
  json doc = minimal_config("ww");
  doc["params"]["experiment"] = "dirichlet";
  doc["params"]["N"] = {100};
  doc["assertions"]["min_grid_sup"] = 0.5;
  const Report r = execute(RunConfig::parse(doc), 1);
  CHECK(r.columns == std::vector<std::string>{"N", "grid_sup", "lobe_value", "lobe_closed_form"});
  CHECK(r.all_pass());
}

TEST_CASE("cache: store, lookup, corrupt entries ignored, partial entries invisible") {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("ergonet-cache-test-" + std::to_string(::getpid()));
  fs::remove_all(root);
  setenv("ERGONET_CACHE_DIR", root.c_str(), 1);

  Report r;
  r.columns = {"x"};
  r.rows.push_back({1.5});
  cache_store("deadbeef", r, 0);
  auto hit = cache_lookup("deadbeef");
  REQUIRE(hit.has_value());
  CHECK(hit->exit_code == 0);

  // corrupt the metadata: the entry must be ignored with a warning
  {
    std::ofstream out(hit->dir / "meta.json", std::ios::trunc);
    out << "{ not json";
  }
  CHECK(!cache_lookup("deadbeef").has_value());

  // a partial entry (missing files) is a miss even with complete meta
  fs::create_directories(root / "cafe");
  {
    std::ofstream out(root / "cafe" / "meta.json");
    out << "{\"complete\": true, \"exit_code\": 0}";
  }
  CHECK(!cache_lookup("cafe").has_value());

  unsetenv("ERGONET_CACHE_DIR");
  fs::remove_all(root);
}

TEST_CASE("execute: analyze on the stochastic chain round-trips through JSON") {
  json doc = minimal_config("analyze");
  doc["params"]["model"]["kind"] = "stochastic";
  doc["params"]["schemes"]["kind"] = "cesaro_pow2";
  doc["params"]["schemes"]["min_exp"] = 4;
  doc["params"]["schemes"]["max_exp"] = 16;
  doc["params"]["schemes"]["step_exp"] = 4;
  doc["assertions"]["expect_mean_ergodic"] = true;
  const Report r = execute(RunConfig::parse(doc), 1);
  CHECK(r.all_pass());
  const json out = r.to_json();
  CHECK(out["meta"]["config_hash"] == config_hash_hex(doc));
  CHECK(out["all_pass"].get<bool>());
  // config re-parses to an equivalent document (schema round-trip)
  const RunConfig again = RunConfig::parse(json::parse(doc.dump()));
  CHECK(config_hash_hex(again.raw) == config_hash_hex(doc));
}

TEST_CASE("every shipped config parses, validates, and hash-round-trips") {
  namespace fs = std::filesystem;
  const fs::path dir(ERGONET_CONFIGS_DIR);
  REQUIRE(fs::is_directory(dir));
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    if (entry.path().filename() == "schema.json") continue;
    CAPTURE(entry.path().string());
    const RunConfig cfg = RunConfig::load(entry.path());
    CHECK(!cfg.subcommand.empty());
    // re-serialize and re-parse: an equivalent config with the same hash
    const json echo = json::parse(cfg.raw.dump());
    const RunConfig again = RunConfig::parse(echo);
    CHECK(config_hash_hex(again.raw) == config_hash_hex(cfg.raw));
    ++seen;
  }
  CHECK(seen >= 10);
}

TEST_CASE("shipped schema.json matches the schema the binary enforces") {
  namespace fs = std::filesystem;
  const fs::path p = fs::path(ERGONET_CONFIGS_DIR) / "schema.json";
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == config_schema_text());
}

TEST_CASE("execute: frequency-modulated one-parameter family converges uniformly") {
  json doc;
  doc["version"] = 1;
  doc["subcommand"] = "uniform";
  doc["params"]["family"] = "d";
  doc["params"]["model"] = {{"kind", "one_param_modes"},
                            {"freqs", {0.0, 0.437}},
                            {"decays", {0.0, 0.05}},
                            {"t_max", 8.0}};
  doc["params"]["index_grid"] = {{"kind", "frequencies"}, {"lo", 0.0}, {"hi", 0.25}, {"m", 6}};
  doc["params"]["schemes"] = {{"kind", "time_average"}, {"s", {64.0, 512.0, 2048.0}}, {"h", 0.03125}};
  // probe along the rotating mode: every sampled modulation averages it away
  doc["params"]["probe"] = json::array({json::array({0.0, 0.0}), json::array({1.0, 0.0})});
  doc["assertions"]["expect_uniform_convergence"] = true;
  doc["assertions"]["sup_tol"] = 5e-3;
  doc["tolerances"]["quad_tol"] = 1e-6;
  const Report r = execute(RunConfig::parse(doc), 2);
  CHECK(r.all_pass());
}

TEST_CASE("execute: cocycle family over a Koopman base") {
  json doc;
  doc["version"] = 1;
  doc["subcommand"] = "uniform";
  doc["seed"] = 9;
  doc["params"]["family"] = "c";
  doc["params"]["model"] = {{"kind", "koopman_rotation"}, {"grid", 32}, {"steps", 3}};
  doc["params"]["index_grid"] = {{"kind", "cocycles_random"}, {"count", 3}};
  doc["params"]["schemes"] = {{"kind", "cesaro"}, {"N", {64, 256}}};
  doc["params"]["probe"] = "coordinate";
  const Report r = execute(RunConfig::parse(doc), 1);
  CHECK(r.rows.size() == 2);
  // rows carry finite sups; cocycle modulation keeps everything contractive
  for (const auto& row : r.rows) {
    CHECK(std::get<double>(row[1]) <= 1.0 + 1e-12);
    CHECK(std::get<bool>(row[3]));  // finite index list: refinement is exact
  }
}
