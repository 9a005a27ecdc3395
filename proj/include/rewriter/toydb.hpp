#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rewriter/catalog.hpp"
#include "rewriter/plan.hpp"

namespace rewriter {

// In-memory table: ordered bag of typed rows.
struct ToyTable {
  std::vector<std::pair<std::string, ColumnType>> columns;
  std::vector<Row> rows;
};

struct ToyDatabase {
  std::map<std::string, ToyTable> tables;

  const ToyTable* find_table(const std::string& name) const;
};

// Deterministically generates a database conforming to the catalog:
// integer columns draw from [min, max] with about ndv distinct values,
// key-like columns (ndv == rows) are a shuffled dense range so that
// equality joins hit. Table sizes are capped at max_rows.
ToyDatabase generate_toy_database(const CatalogStats& catalog,
                                  std::uint64_t seed,
                                  std::int64_t max_rows = 1000);

struct ExecResult {
  Schema schema;
  std::vector<Row> rows;
  // Rows produced by every non-scan operator plus rows scanned.
  std::int64_t work_units{0};
};

// Exact bag-semantics evaluation; Sort is stable, cartesian joins
// enumerate all pairs, inner equi-joins hash-partition on the equality
// keys. Throws SchemaMismatch / DivisionByZero.
ExecResult execute(const QueryTree& tree, const ToyDatabase& db);

struct EquivalenceVerdict {
  bool equivalent{true};
  int failed_trial{-1};
  std::string detail;                  // empty when equivalent
  std::optional<std::uint64_t> counterexample_seed;
};

// Runs `trials` seeded random databases; trees compare bag-equal
// (sequence-equal when both roots are Sort with identical keys).
// Non-equivalence is a verdict, not an error; evaluation errors on
// either side also yield a non-equivalent verdict with the detail set.
EquivalenceVerdict check_equivalence(const QueryTree& a, const QueryTree& b,
                                     const CatalogStats& catalog, int trials,
                                     std::uint64_t seed);

}  // namespace rewriter
