#include "rewriter/catalog.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rewriter/errors.hpp"

namespace rewriter {

using nlohmann::json;

const ColumnStats* TableStats::find_column(const std::string& name) const {
  auto it = columns.find(name);
  return it == columns.end() ? nullptr : &it->second;
}

const TableStats* CatalogStats::find_table(const std::string& name) const {
  auto it = tables.find(name);
  return it == tables.end() ? nullptr : &it->second;
}

std::string catalog_to_json(const CatalogStats& c) {
  json tables;
  for (const auto& [tname, t] : c.tables) {
    json cols;
    for (const auto& [cname, col] : t.columns) {
      cols[cname] = json{{"ndv", col.ndv},
                         {"min", col.min_value},
                         {"max", col.max_value},
                         {"type", column_type_name(col.type)}};
    }
    tables[tname] = json{{"rows", t.rows}, {"columns", cols}};
  }
  return json{{"tables", tables}}.dump(2) + "\n";
}

CatalogStats catalog_from_json(const std::string& json_text) {
  CatalogStats out;
  json j = json::parse(json_text);
  for (const auto& [tname, tj] : j.at("tables").items()) {
    TableStats t;
    t.rows = tj.at("rows").get<std::int64_t>();
    for (const auto& [cname, cj] : tj.at("columns").items()) {
      ColumnStats col;
      col.ndv = cj.at("ndv").get<std::int64_t>();
      col.min_value = cj.at("min").get<std::int64_t>();
      col.max_value = cj.at("max").get<std::int64_t>();
      col.type = column_type_from_name(cj.at("type").get<std::string>());
      if (col.ndv > t.rows && t.rows > 0) col.ndv = t.rows;
      if (col.min_value > col.max_value) {
        throw ConfigError("column " + cname + ": min > max");
      }
      t.columns.emplace(cname, col);
    }
    out.tables.emplace(tname, std::move(t));
  }
  return out;
}

CatalogStats load_catalog_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return catalog_from_json(ss.str());
}

void save_catalog_file(const CatalogStats& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << catalog_to_json(c);
}

}  // namespace rewriter
