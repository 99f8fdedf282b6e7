#include <fstream>
#include <sstream>

#include "ergonet/runner.hpp"

namespace ergonet::runner {

namespace {

const char* kSchema = R"JSON({
  "$id": "ergonet-config",
  "type": "object",
  "required": ["version", "subcommand"],
  "additionalProperties": false,
  "properties": {
    "version": {"type": "integer", "minimum": 1},
    "subcommand": {"type": "string", "enum": ["analyze", "net", "uniform", "ww", "equivalence"]},
    "seed": {"type": "integer", "minimum": 0},
    "tolerances": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "rank_tol": {"type": "number", "exclusiveMinimum": 0},
        "angle_tol": {"type": "number", "exclusiveMinimum": 0},
        "zero_tol": {"type": "number", "exclusiveMinimum": 0},
        "net_tol": {"type": "number", "exclusiveMinimum": 0, "artifact_choice": true},
        "quad_tol": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "params": {"type": "object"},
    "assertions": {"type": "object"},
    "output": {
      "type": "object",
      "additionalProperties": false,
      "properties": {"dir": {"type": "string"}}
    }
  }
})JSON";

std::string ptr_str(const std::string& p) { return p.empty() ? std::string("/") : p; }

/// Small structural validator covering the subset of JSON Schema the shipped
/// schema uses: type, required, properties, additionalProperties, enum,
/// minimum, exclusiveMinimum, items.
void validate(const json& schema, const json& value, const std::string& path) {
  if (schema.contains("type")) {
    const std::string t = schema["type"];
    bool ok = (t == "object" && value.is_object()) || (t == "array" && value.is_array()) ||
              (t == "string" && value.is_string()) || (t == "boolean" && value.is_boolean()) ||
              (t == "integer" && value.is_number_integer()) || (t == "number" && value.is_number());
    if (!ok)
      throw contract_error("config error at " + ptr_str(path) + ": expected " + t);
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& v : schema["enum"]) ok = ok || (v == value);
    if (!ok)
      throw contract_error("config error at " + ptr_str(path) + ": value not in " +
                           schema["enum"].dump());
  }
  if (value.is_number()) {
    const double x = value.get<double>();
    if (schema.contains("minimum") && x < schema["minimum"].get<double>())
      throw contract_error("config error at " + ptr_str(path) + ": below minimum");
    if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>())
      throw contract_error("config error at " + ptr_str(path) + ": must be > " +
                           schema["exclusiveMinimum"].dump());
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!value.contains(key.get<std::string>()))
          throw contract_error("config error at " + ptr_str(path) + ": missing required key '" +
                               key.get<std::string>() + "'");
    const json props = schema.value("properties", json::object());
    const bool extra_ok = schema.value("additionalProperties", true);
    for (const auto& [key, sub] : value.items()) {
      if (props.contains(key)) {
        validate(props[key], sub, path + "/" + key);
      } else if (!extra_ok) {
        throw contract_error("config error at " + ptr_str(path) + ": unknown key '" + key + "'");
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& item : value) {
      validate(schema["items"], item, path + "/" + std::to_string(i));
      ++i;
    }
  }
}

}  // namespace

const std::string& config_schema_text() {
  static const std::string text = json::parse(kSchema).dump(2) + "\n";
  return text;
}

RunConfig RunConfig::parse(const json& doc) {
  static const json schema = json::parse(kSchema);
  validate(schema, doc, "");
  RunConfig cfg;
  cfg.raw = doc;
  cfg.version = doc["version"].get<int>();
  cfg.subcommand = doc["subcommand"].get<std::string>();
  cfg.seed = doc.value("seed", std::uint64_t{0});
  const json t = doc.value("tolerances", json::object());
  cfg.tol.rank_tol = t.value("rank_tol", cfg.tol.rank_tol);
  cfg.tol.angle_tol = t.value("angle_tol", cfg.tol.angle_tol);
  cfg.tol.zero_tol = t.value("zero_tol", cfg.tol.zero_tol);
  cfg.tol.net_tol = t.value("net_tol", cfg.tol.net_tol);
  cfg.tol.quad_tol = t.value("quad_tol", cfg.tol.quad_tol);
  cfg.params = doc.value("params", json::object());
  cfg.assertions = doc.value("assertions", json::object());
  cfg.output_dir = doc.value("output", json::object()).value("dir", cfg.output_dir);
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw contract_error("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // translate the byte offset into a line:column anchor
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < e.byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw contract_error(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                         ": " + e.what());
  }
  return parse(doc);
}

std::string canonical_config_string(const json& doc) {
  json c = doc;
  c.erase("output");  // artifact location must not affect results or caching
  return c.dump();    // nlohmann objects iterate in sorted key order
}

std::string config_hash_hex(const json& doc) {
  const std::string canon = canonical_config_string(doc);
  const std::uint64_t h1 = fnv1a64(canon);
  const std::uint64_t h2 = fnv1a64(canon + "#ergonet");
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(h1),
                static_cast<unsigned long long>(h2));
  return std::string(buf);
}

}  // namespace ergonet::runner
