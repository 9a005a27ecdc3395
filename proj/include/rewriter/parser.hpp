#pragma once

#include <string>

#include "rewriter/catalog.hpp"
#include "rewriter/plan.hpp"

namespace rewriter {

// Parses the supported SELECT subset into a canonical query tree:
//   SELECT item, ...
//   FROM table [, table | INNER JOIN table ON pred] ...
//   [WHERE pred] [GROUP BY cols]
//   [UNION ALL <select>] [ORDER BY cols [ASC|DESC]] [LIMIT n]
// Union branches may be parenthesized statements carrying their own
// ORDER BY / LIMIT. Comma-separated FROM items become left-deep
// cartesian joins; WHERE becomes a single Filter; a select list with
// aggregate calls or GROUP BY becomes an Aggregate above a
// column-only Project of its input columns.
//
// Identifiers are case-insensitive and stored lower-case.
QueryTree parse(const std::string& sql);

// Same, but also resolves and type-checks every column reference against
// the catalog (throws UnresolvedColumn / SchemaMismatch).
QueryTree parse(const std::string& sql, const CatalogStats& catalog);

}  // namespace rewriter
