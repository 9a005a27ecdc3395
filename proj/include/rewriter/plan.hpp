#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rewriter/catalog.hpp"
#include "rewriter/expr.hpp"

namespace rewriter {

enum class NodeKind { Scan, Filter, Project, Join, Aggregate, Sort, Union, Limit };
constexpr int kNodeKindCount = 8;

std::string node_kind_name(NodeKind k);
NodeKind node_kind_from_name(const std::string& s);

enum class JoinType { Inner, Cartesian };

struct SortKey {
  std::string column;  // unqualified output-column name
  bool asc{true};
};

struct AggCall {
  AggFn fn{AggFn::Count};
  bool star{false};
  std::string table;   // argument qualifier as written ("" if none)
  std::string column;  // argument column ("" for star)

  // Deterministic output column name, e.g. "count_star", "sum_total".
  std::string output_name() const;
};

// One entry of an Aggregate's select list, in select order.
struct AggItem {
  bool is_call{false};
  // key item: a group key reference as written
  std::string table;
  std::string column;
  // call item
  AggCall call;
};

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;

// Immutable logical plan node. Children arity is fixed per kind:
// Scan 0; Filter/Project/Aggregate/Sort/Limit 1; Join/Union 2.
struct PlanNode {
  NodeKind kind{NodeKind::Scan};

  std::string table;                 // Scan
  ExprPtr predicate;                 // Filter; Join (Inner)
  JoinType join_type{JoinType::Cartesian};
  std::vector<ExprPtr> items;        // Project select list
  std::vector<AggItem> agg_items;    // Aggregate select list, in select order
  std::vector<std::pair<std::string, std::string>> group_keys;  // (table, column)
  std::vector<SortKey> sort_keys;    // Sort (non-empty)
  std::int64_t limit_count{0};       // Limit (>= 0)

  std::vector<PlanPtr> children;
};

struct QueryTree {
  PlanPtr root;
};

PlanPtr make_scan(std::string table);
PlanPtr make_filter(ExprPtr pred, PlanPtr child);
PlanPtr make_project(std::vector<ExprPtr> items, PlanPtr child);
PlanPtr make_join(JoinType type, ExprPtr pred, PlanPtr left, PlanPtr right);
PlanPtr make_aggregate(std::vector<AggItem> items,
                       std::vector<std::pair<std::string, std::string>> keys,
                       PlanPtr child);
PlanPtr make_sort(std::vector<SortKey> keys, PlanPtr child);
PlanPtr make_union(PlanPtr left, PlanPtr right);
PlanPtr make_limit(std::int64_t count, PlanPtr child);

PlanPtr clone_with_children(const PlanNode& node, std::vector<PlanPtr> children);

// Deterministic one-line text of the node payload (used for prompts,
// encoder condition features and debugging).
std::string node_condition_text(const PlanNode& node);

bool plan_equal(const PlanPtr& a, const PlanPtr& b);
bool tree_equal(const QueryTree& a, const QueryTree& b);

std::size_t node_count(const QueryTree& t);
std::size_t tree_depth(const QueryTree& t);

struct TreeStats {
  std::size_t nodes{0};
  std::size_t depth{0};
  std::map<std::string, std::size_t> per_kind;
};

TreeStats tree_stats(const QueryTree& t);

// Preorder traversal (node, depth, parent index or npos).
void preorder(const PlanPtr& root,
              const std::function<void(const PlanNode&, std::size_t depth)>& fn);
std::vector<const PlanNode*> preorder_nodes(const PlanPtr& root);

// Set of scan table names occurring in a subtree.
std::vector<std::string> scan_tables(const PlanPtr& node);

// One output column of a node: its unqualified name, the qualifier it can
// be addressed by ("" once qualifiers are lost, e.g. above a Union), and
// its type.
struct OutColumn {
  std::string qualifier;
  std::string name;
  ColumnType type{ColumnType::Int};
};

using Schema = std::vector<OutColumn>;

// Computes the node's output schema against a catalog, resolving and
// type-checking every column reference in the subtree. Throws
// UnresolvedColumn / SchemaMismatch / UnsupportedFeature.
Schema output_schema(const PlanPtr& node, const CatalogStats& catalog);

// Full structural + resolution validation: arity, payload invariants and
// schema resolution. Throws on the first violation.
void validate_tree(const QueryTree& t, const CatalogStats& catalog);

// JSON (de)serialization of plans; used by fixture files and debugging.
std::string plan_to_json(const PlanPtr& node);
PlanPtr plan_from_json(const std::string& json_text);

}  // namespace rewriter
