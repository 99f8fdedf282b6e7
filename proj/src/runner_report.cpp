#include "ergonet/runner.hpp"

namespace ergonet::runner {

namespace {

std::string cell_to_string(const Report::Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_g17(v);
        if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        if constexpr (std::is_same_v<T, std::string>) {
          if (v.find(',') == std::string::npos && v.find('"') == std::string::npos) return v;
          std::string out = "\"";
          for (char ch : v) {
            if (ch == '"') out += '"';
            out += ch;
          }
          out += '"';
          return out;
        }
      },
      c);
}

json cell_to_json(const Report::Cell& c) {
  return std::visit([](const auto& v) -> json { return json(v); }, c);
}

}  // namespace

bool Report::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

std::string Report::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += cell_to_string(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string Report::plot_data() const {
  std::string out;
  const std::size_t xi = static_cast<std::size_t>(plot_x);
  const std::size_t yi = static_cast<std::size_t>(plot_y);
  for (const auto& row : rows) {
    if (xi >= row.size() || yi >= row.size()) continue;
    out += cell_to_string(row[xi]);
    out += ' ';
    out += cell_to_string(row[yi]);
    out += '\n';
  }
  return out;
}

json Report::to_json() const {
  json j;
  j["meta"] = meta;
  j["columns"] = columns;
  json rws = json::array();
  for (const auto& row : rows) {
    json r = json::array();
    for (const auto& c : row) r.push_back(cell_to_json(c));
    rws.push_back(std::move(r));
  }
  j["rows"] = std::move(rws);
  json vs = json::array();
  for (const auto& v : verdicts)
    vs.push_back(json{{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  j["verdicts"] = std::move(vs);
  j["all_pass"] = all_pass();
  return j;
}

}  // namespace ergonet::runner
