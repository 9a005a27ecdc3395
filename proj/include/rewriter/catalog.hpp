#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rewriter/value.hpp"

namespace rewriter {

struct ColumnStats {
  ColumnType type{ColumnType::Int};
  std::int64_t ndv{1};       // distinct count, <= table rows
  std::int64_t min_value{0}; // numeric columns only
  std::int64_t max_value{0};
};

struct TableStats {
  std::int64_t rows{0};
  // Column order is alphabetical by name everywhere (including the scan
  // output schema), which keeps in-memory and file-loaded catalogs
  // identical.
  std::map<std::string, ColumnStats> columns;

  const ColumnStats* find_column(const std::string& name) const;
};

struct CatalogStats {
  std::map<std::string, TableStats> tables;

  const TableStats* find_table(const std::string& name) const;
};

// Catalog file format: {"tables": {name: {"rows": n, "columns": {name:
// {"ndv": n, "min": n, "max": n, "type": "int"|"double"|"string"}}}}}.
std::string catalog_to_json(const CatalogStats& c);
CatalogStats catalog_from_json(const std::string& json_text);

CatalogStats load_catalog_file(const std::string& path);
void save_catalog_file(const CatalogStats& c, const std::string& path);

}  // namespace rewriter
