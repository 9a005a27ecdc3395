#include "rewriter/plan.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "rewriter/errors.hpp"

namespace rewriter {

using nlohmann::json;

std::string node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Scan: return "Scan";
    case NodeKind::Filter: return "Filter";
    case NodeKind::Project: return "Project";
    case NodeKind::Join: return "Join";
    case NodeKind::Aggregate: return "Aggregate";
    case NodeKind::Sort: return "Sort";
    case NodeKind::Union: return "Union";
    case NodeKind::Limit: return "Limit";
  }
  return "Scan";
}

NodeKind node_kind_from_name(const std::string& s) {
  for (int i = 0; i < kNodeKindCount; ++i) {
    if (node_kind_name(static_cast<NodeKind>(i)) == s) {
      return static_cast<NodeKind>(i);
    }
  }
  throw ConfigError("unknown plan node kind: " + s);
}

std::string AggCall::output_name() const {
  std::string fn = agg_fn_name(this->fn);
  std::transform(fn.begin(), fn.end(), fn.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (star) return fn + "_star";
  return fn + "_" + column;
}

PlanPtr make_scan(std::string table) {
  auto n = std::make_shared<PlanNode>();
  n->kind = NodeKind::Scan;
  n->table = std::move(table);
  return n;
}

PlanPtr make_filter(ExprPtr pred, PlanPtr child) {
  auto n = std::make_shared<PlanNode>();
  n->kind = NodeKind::Filter;
  n->predicate = std::move(pred);
  n->children = {std::move(child)};
  return n;
}

PlanPtr make_project(std::vector<ExprPtr> items, PlanPtr child) {
  auto n = std::make_shared<PlanNode>();
  n->kind = NodeKind::Project;
  n->items = std::move(items);
  n->children = {std::move(child)};
  return n;
}

PlanPtr make_join(JoinType type, ExprPtr pred, PlanPtr left, PlanPtr right) {
  auto n = std::make_shared<PlanNode>();
  n->kind = NodeKind::Join;
  n->join_type = type;
  n->predicate = std::move(pred);
  n->children = {std::move(left), std::move(right)};
  return n;
}

PlanPtr make_aggregate(std::vector<AggItem> items,
                       std::vector<std::pair<std::string, std::string>> keys,
                       PlanPtr child) {
  auto n = std::make_shared<PlanNode>();
  n->kind = NodeKind::Aggregate;
  n->agg_items = std::move(items);
  n->group_keys = std::move(keys);
  n->children = {std::move(child)};
  return n;
}

PlanPtr make_sort(std::vector<SortKey> keys, PlanPtr child) {
  auto n = std::make_shared<PlanNode>();
  n->kind = NodeKind::Sort;
  n->sort_keys = std::move(keys);
  n->children = {std::move(child)};
  return n;
}

PlanPtr make_union(PlanPtr left, PlanPtr right) {
  auto n = std::make_shared<PlanNode>();
  n->kind = NodeKind::Union;
  n->children = {std::move(left), std::move(right)};
  return n;
}

PlanPtr make_limit(std::int64_t count, PlanPtr child) {
  auto n = std::make_shared<PlanNode>();
  n->kind = NodeKind::Limit;
  n->limit_count = count;
  n->children = {std::move(child)};
  return n;
}

PlanPtr clone_with_children(const PlanNode& node, std::vector<PlanPtr> children) {
  auto n = std::make_shared<PlanNode>(node);
  n->children = std::move(children);
  return n;
}

std::string node_condition_text(const PlanNode& node) {
  switch (node.kind) {
    case NodeKind::Scan:
      return node.table;
    case NodeKind::Filter:
      return expr_to_text(node.predicate);
    case NodeKind::Project: {
      std::string out;
      for (std::size_t i = 0; i < node.items.size(); ++i) {
        if (i) out += ", ";
        out += expr_to_text(node.items[i]);
      }
      return out;
    }
    case NodeKind::Join:
      return node.join_type == JoinType::Inner ? expr_to_text(node.predicate)
                                               : "";
    case NodeKind::Aggregate: {
      std::string out;
      for (std::size_t i = 0; i < node.agg_items.size(); ++i) {
        if (i) out += ", ";
        const AggItem& it = node.agg_items[i];
        if (it.is_call) {
          out += expr_to_text(it.call.star
                                  ? make_agg_star(it.call.fn)
                                  : make_agg_col(it.call.fn, it.call.table,
                                                 it.call.column));
        } else {
          out += it.table.empty() ? it.column : it.table + "." + it.column;
        }
      }
      if (!node.group_keys.empty()) {
        out += " GROUP BY ";
        for (std::size_t i = 0; i < node.group_keys.size(); ++i) {
          if (i) out += ", ";
          const auto& [t, c] = node.group_keys[i];
          out += t.empty() ? c : t + "." + c;
        }
      }
      return out;
    }
    case NodeKind::Sort: {
      std::string out;
      for (std::size_t i = 0; i < node.sort_keys.size(); ++i) {
        if (i) out += ", ";
        out += node.sort_keys[i].column;
        if (!node.sort_keys[i].asc) out += " DESC";
      }
      return out;
    }
    case NodeKind::Union:
      return "";
    case NodeKind::Limit:
      return std::to_string(node.limit_count);
  }
  return "";
}

bool plan_equal(const PlanPtr& a, const PlanPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Scan:
      if (a->table != b->table) return false;
      break;
    case NodeKind::Filter:
      if (!expr_equal(a->predicate, b->predicate)) return false;
      break;
    case NodeKind::Project: {
      if (a->items.size() != b->items.size()) return false;
      for (std::size_t i = 0; i < a->items.size(); ++i) {
        if (!expr_equal(a->items[i], b->items[i])) return false;
      }
      break;
    }
    case NodeKind::Join:
      if (a->join_type != b->join_type) return false;
      if ((a->predicate == nullptr) != (b->predicate == nullptr)) return false;
      if (a->predicate && !expr_equal(a->predicate, b->predicate)) return false;
      break;
    case NodeKind::Aggregate: {
      if (a->group_keys != b->group_keys) return false;
      if (a->agg_items.size() != b->agg_items.size()) return false;
      for (std::size_t i = 0; i < a->agg_items.size(); ++i) {
        const AggItem& x = a->agg_items[i];
        const AggItem& y = b->agg_items[i];
        if (x.is_call != y.is_call) return false;
        if (x.is_call) {
          if (x.call.fn != y.call.fn || x.call.star != y.call.star ||
              x.call.table != y.call.table || x.call.column != y.call.column) {
            return false;
          }
        } else {
          if (x.table != y.table || x.column != y.column) return false;
        }
      }
      break;
    }
    case NodeKind::Sort: {
      if (a->sort_keys.size() != b->sort_keys.size()) return false;
      for (std::size_t i = 0; i < a->sort_keys.size(); ++i) {
        if (a->sort_keys[i].column != b->sort_keys[i].column ||
            a->sort_keys[i].asc != b->sort_keys[i].asc) {
          return false;
        }
      }
      break;
    }
    case NodeKind::Union:
      break;
    case NodeKind::Limit:
      if (a->limit_count != b->limit_count) return false;
      break;
  }
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!plan_equal(a->children[i], b->children[i])) return false;
  }
  return true;
}

bool tree_equal(const QueryTree& a, const QueryTree& b) {
  return plan_equal(a.root, b.root);
}

void preorder(const PlanPtr& root,
              const std::function<void(const PlanNode&, std::size_t)>& fn) {
  struct Walker {
    const std::function<void(const PlanNode&, std::size_t)>& fn;
    void walk(const PlanPtr& n, std::size_t depth) {
      fn(*n, depth);
      for (const auto& c : n->children) walk(c, depth + 1);
    }
  } w{fn};
  if (root) w.walk(root, 1);
}

std::vector<const PlanNode*> preorder_nodes(const PlanPtr& root) {
  std::vector<const PlanNode*> out;
  preorder(root, [&](const PlanNode& n, std::size_t) { out.push_back(&n); });
  return out;
}

std::size_t node_count(const QueryTree& t) {
  return preorder_nodes(t.root).size();
}

std::size_t tree_depth(const QueryTree& t) {
  std::size_t depth = 0;
  preorder(t.root, [&](const PlanNode&, std::size_t d) {
    depth = std::max(depth, d);
  });
  return depth;
}

TreeStats tree_stats(const QueryTree& t) {
  TreeStats s;
  preorder(t.root, [&](const PlanNode& n, std::size_t d) {
    ++s.nodes;
    s.depth = std::max(s.depth, d);
    ++s.per_kind[node_kind_name(n.kind)];
  });
  return s;
}

std::vector<std::string> scan_tables(const PlanPtr& node) {
  std::vector<std::string> out;
  preorder(node, [&](const PlanNode& n, std::size_t) {
    if (n.kind == NodeKind::Scan) out.push_back(n.table);
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::vector<std::string> schema_names(const Schema& s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  for (const auto& c : s) {
    out.push_back(c.qualifier.empty() ? c.name : c.qualifier + "." + c.name);
  }
  return out;
}

// Resolves a (possibly qualified) column reference against a schema.
const OutColumn& resolve_column(const Schema& schema, const std::string& table,
                                const std::string& column) {
  const OutColumn* found = nullptr;
  for (const auto& c : schema) {
    const bool match = table.empty()
                           ? c.name == column
                           : (c.qualifier == table && c.name == column);
    if (!match) continue;
    if (found != nullptr) {
      throw UnresolvedColumn(table.empty() ? column : table + "." + column,
                             schema_names(schema));
    }
    found = &c;
  }
  if (found == nullptr) {
    throw UnresolvedColumn(table.empty() ? column : table + "." + column,
                           schema_names(schema));
  }
  return *found;
}

ColumnType check_expr(const ExprPtr& e, const Schema& schema, bool allow_agg);

void check_comparable(ColumnType a, ColumnType b, const std::string& what) {
  const bool na = a != ColumnType::String;
  const bool nb = b != ColumnType::String;
  if (na != nb) {
    throw SchemaMismatch("incomparable types in " + what);
  }
}

ColumnType check_expr(const ExprPtr& e, const Schema& schema, bool allow_agg) {
  switch (e->kind) {
    case ExprKind::Column:
      return resolve_column(schema, e->table, e->column).type;
    case ExprKind::Literal:
      if (std::holds_alternative<std::int64_t>(e->literal)) return ColumnType::Int;
      if (std::holds_alternative<double>(e->literal)) return ColumnType::Double;
      return ColumnType::String;
    case ExprKind::Compare: {
      ColumnType l = check_expr(e->children[0], schema, allow_agg);
      ColumnType r = check_expr(e->children[1], schema, allow_agg);
      check_comparable(l, r, "comparison");
      return ColumnType::Int;  // boolean, represented as int
    }
    case ExprKind::Arith: {
      ColumnType l = check_expr(e->children[0], schema, allow_agg);
      ColumnType r = check_expr(e->children[1], schema, allow_agg);
      if (l == ColumnType::String || r == ColumnType::String) {
        throw SchemaMismatch("arithmetic over string operand");
      }
      return (l == ColumnType::Double || r == ColumnType::Double)
                 ? ColumnType::Double
                 : ColumnType::Int;
    }
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Not:
      for (const auto& c : e->children) check_expr(c, schema, allow_agg);
      return ColumnType::Int;
    case ExprKind::AggCall: {
      if (!allow_agg) {
        throw SchemaMismatch("aggregate call outside an aggregate select list");
      }
      if (e->star) return ColumnType::Int;
      ColumnType t = resolve_column(schema, e->table, e->column).type;
      if (e->agg == AggFn::Count) return ColumnType::Int;
      if (e->agg == AggFn::Avg) return ColumnType::Double;
      if ((e->agg == AggFn::Sum) && t == ColumnType::String) {
        throw SchemaMismatch("SUM over string column");
      }
      return t;
    }
  }
  return ColumnType::Int;
}

ColumnType agg_call_type(const AggCall& call, const Schema& in) {
  if (call.star) return ColumnType::Int;
  ColumnType t = resolve_column(in, call.table, call.column).type;
  switch (call.fn) {
    case AggFn::Count: return ColumnType::Int;
    case AggFn::Avg: return ColumnType::Double;
    case AggFn::Sum:
      if (t == ColumnType::String) throw SchemaMismatch("SUM over string column");
      return t;
    case AggFn::Min:
    case AggFn::Max:
      return t;
  }
  return t;
}

}  // namespace

Schema output_schema(const PlanPtr& node, const CatalogStats& catalog) {
  switch (node->kind) {
    case NodeKind::Scan: {
      const TableStats* t = catalog.find_table(node->table);
      if (t == nullptr) throw SchemaMismatch("unknown table: " + node->table);
      Schema s;
      for (const auto& [name, col] : t->columns) {
        s.push_back({node->table, name, col.type});
      }
      return s;
    }
    case NodeKind::Filter: {
      Schema in = output_schema(node->children[0], catalog);
      check_expr(node->predicate, in, /*allow_agg=*/false);
      return in;
    }
    case NodeKind::Project: {
      Schema in = output_schema(node->children[0], catalog);
      Schema out;
      for (std::size_t i = 0; i < node->items.size(); ++i) {
        const ExprPtr& it = node->items[i];
        ColumnType t = check_expr(it, in, /*allow_agg=*/false);
        if (it->kind == ExprKind::Column) {
          const OutColumn& c = resolve_column(in, it->table, it->column);
          out.push_back({c.qualifier, c.name, c.type});
        } else {
          out.push_back({"", "expr" + std::to_string(i), t});
        }
      }
      return out;
    }
    case NodeKind::Join: {
      Schema l = output_schema(node->children[0], catalog);
      Schema r = output_schema(node->children[1], catalog);
      Schema out = l;
      out.insert(out.end(), r.begin(), r.end());
      if (node->join_type == JoinType::Inner) {
        if (!node->predicate) {
          throw SchemaMismatch("inner join without a condition");
        }
        check_expr(node->predicate, out, /*allow_agg=*/false);
      }
      return out;
    }
    case NodeKind::Aggregate: {
      Schema in = output_schema(node->children[0], catalog);
      for (const auto& [t, c] : node->group_keys) resolve_column(in, t, c);
      Schema out;
      for (const AggItem& it : node->agg_items) {
        if (it.is_call) {
          out.push_back({"", it.call.output_name(), agg_call_type(it.call, in)});
        } else {
          const OutColumn& c = resolve_column(in, it.table, it.column);
          const bool grouped = std::any_of(
              node->group_keys.begin(), node->group_keys.end(),
              [&](const auto& k) {
                const OutColumn& kc = resolve_column(in, k.first, k.second);
                return &kc == &c;
              });
          if (!grouped) {
            throw SchemaMismatch("select item '" + c.name +
                                 "' is not a group key");
          }
          out.push_back({"", c.name, c.type});
        }
      }
      return out;
    }
    case NodeKind::Sort: {
      Schema in = output_schema(node->children[0], catalog);
      for (const SortKey& k : node->sort_keys) resolve_column(in, "", k.column);
      return in;
    }
    case NodeKind::Union: {
      Schema l = output_schema(node->children[0], catalog);
      Schema r = output_schema(node->children[1], catalog);
      if (l.size() != r.size()) {
        throw SchemaMismatch("union branches have different arity");
      }
      Schema out;
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (l[i].type != r[i].type) {
          const bool ln = l[i].type != ColumnType::String;
          const bool rn = r[i].type != ColumnType::String;
          if (ln != rn) throw SchemaMismatch("union branch type mismatch");
        }
        // Qualifiers do not survive a union.
        out.push_back({"", l[i].name, l[i].type});
      }
      return out;
    }
    case NodeKind::Limit:
      return output_schema(node->children[0], catalog);
  }
  return {};
}

namespace {

void check_arity(const PlanNode& n) {
  std::size_t want = 1;
  switch (n.kind) {
    case NodeKind::Scan: want = 0; break;
    case NodeKind::Join:
    case NodeKind::Union: want = 2; break;
    default: want = 1; break;
  }
  if (n.children.size() != want) {
    throw SchemaMismatch(node_kind_name(n.kind) + " node with " +
                         std::to_string(n.children.size()) + " children");
  }
  switch (n.kind) {
    case NodeKind::Filter:
      if (!n.predicate) throw SchemaMismatch("filter without predicate");
      if (expr_contains_agg(n.predicate)) {
        throw SchemaMismatch("aggregate call in filter predicate");
      }
      break;
    case NodeKind::Project:
      if (n.items.empty()) throw SchemaMismatch("empty project list");
      for (const auto& it : n.items) {
        if (expr_contains_agg(it)) {
          throw SchemaMismatch("aggregate call in project item");
        }
      }
      break;
    case NodeKind::Aggregate:
      if (n.agg_items.empty()) throw SchemaMismatch("empty aggregate list");
      break;
    case NodeKind::Sort:
      if (n.sort_keys.empty()) throw SchemaMismatch("sort without keys");
      break;
    case NodeKind::Limit:
      if (n.limit_count < 0) throw SchemaMismatch("negative limit");
      break;
    case NodeKind::Join:
      if (n.join_type == JoinType::Inner && !n.predicate) {
        throw SchemaMismatch("inner join without condition");
      }
      if (n.predicate && expr_contains_agg(n.predicate)) {
        throw SchemaMismatch("aggregate call in join condition");
      }
      break;
    default:
      break;
  }
}

}  // namespace

void validate_tree(const QueryTree& t, const CatalogStats& catalog) {
  if (!t.root) throw SchemaMismatch("empty tree");
  preorder(t.root, [](const PlanNode& n, std::size_t) { check_arity(n); });
  output_schema(t.root, catalog);
}

namespace {

json expr_to_json_obj(const ExprPtr& e);

json plan_to_json_obj(const PlanPtr& n) {
  json j;
  j["kind"] = node_kind_name(n->kind);
  switch (n->kind) {
    case NodeKind::Scan:
      j["table"] = n->table;
      break;
    case NodeKind::Filter:
      j["predicate"] = expr_to_json_obj(n->predicate);
      break;
    case NodeKind::Project: {
      json items = json::array();
      for (const auto& it : n->items) items.push_back(expr_to_json_obj(it));
      j["items"] = items;
      break;
    }
    case NodeKind::Join:
      j["join_type"] = n->join_type == JoinType::Inner ? "inner" : "cartesian";
      if (n->predicate) j["predicate"] = expr_to_json_obj(n->predicate);
      break;
    case NodeKind::Aggregate: {
      json items = json::array();
      for (const auto& it : n->agg_items) {
        json o;
        o["is_call"] = it.is_call;
        if (it.is_call) {
          o["fn"] = agg_fn_name(it.call.fn);
          o["star"] = it.call.star;
          o["table"] = it.call.table;
          o["column"] = it.call.column;
        } else {
          o["table"] = it.table;
          o["column"] = it.column;
        }
        items.push_back(o);
      }
      j["select"] = items;
      json keys = json::array();
      for (const auto& [t, c] : n->group_keys) {
        keys.push_back(json{{"table", t}, {"column", c}});
      }
      j["group_keys"] = keys;
      break;
    }
    case NodeKind::Sort: {
      json keys = json::array();
      for (const auto& k : n->sort_keys) {
        keys.push_back(json{{"column", k.column}, {"asc", k.asc}});
      }
      j["sort_keys"] = keys;
      break;
    }
    case NodeKind::Union:
      break;
    case NodeKind::Limit:
      j["count"] = n->limit_count;
      break;
  }
  if (!n->children.empty()) {
    json kids = json::array();
    for (const auto& c : n->children) kids.push_back(plan_to_json_obj(c));
    j["children"] = kids;
  }
  return j;
}

json expr_to_json_obj(const ExprPtr& e) {
  json j;
  switch (e->kind) {
    case ExprKind::Column:
      j["op"] = "column";
      j["table"] = e->table;
      j["column"] = e->column;
      return j;
    case ExprKind::Literal:
      j["op"] = "literal";
      if (std::holds_alternative<std::int64_t>(e->literal)) {
        j["int"] = std::get<std::int64_t>(e->literal);
      } else if (std::holds_alternative<double>(e->literal)) {
        j["double"] = std::get<double>(e->literal);
      } else {
        j["string"] = std::get<std::string>(e->literal);
      }
      return j;
    case ExprKind::Compare:
      j["op"] = "cmp";
      j["cmp"] = cmp_op_text(e->cmp);
      break;
    case ExprKind::Arith:
      j["op"] = "arith";
      j["arith"] = arith_op_text(e->arith);
      break;
    case ExprKind::And:
      j["op"] = "and";
      break;
    case ExprKind::Or:
      j["op"] = "or";
      break;
    case ExprKind::Not:
      j["op"] = "not";
      break;
    case ExprKind::AggCall:
      j["op"] = "agg";
      j["fn"] = agg_fn_name(e->agg);
      j["star"] = e->star;
      j["table"] = e->table;
      j["column"] = e->column;
      return j;
  }
  json kids = json::array();
  for (const auto& c : e->children) kids.push_back(expr_to_json_obj(c));
  j["children"] = kids;
  return j;
}

ExprPtr expr_from_json_obj(const json& j) {
  const std::string op = j.at("op").get<std::string>();
  if (op == "column") {
    return make_column(j.at("table").get<std::string>(),
                       j.at("column").get<std::string>());
  }
  if (op == "literal") {
    if (j.contains("int")) return make_literal(j.at("int").get<std::int64_t>());
    if (j.contains("double")) return make_literal(j.at("double").get<double>());
    return make_literal(j.at("string").get<std::string>());
  }
  if (op == "agg") {
    if (j.at("star").get<bool>()) {
      AggFn fn = AggFn::Count;
      const std::string f = j.at("fn").get<std::string>();
      for (AggFn g : {AggFn::Count, AggFn::Sum, AggFn::Min, AggFn::Max, AggFn::Avg}) {
        if (agg_fn_name(g) == f) fn = g;
      }
      return make_agg_star(fn);
    }
    AggFn fn = AggFn::Count;
    const std::string f = j.at("fn").get<std::string>();
    for (AggFn g : {AggFn::Count, AggFn::Sum, AggFn::Min, AggFn::Max, AggFn::Avg}) {
      if (agg_fn_name(g) == f) fn = g;
    }
    return make_agg_col(fn, j.at("table").get<std::string>(),
                        j.at("column").get<std::string>());
  }
  std::vector<ExprPtr> kids;
  for (const auto& c : j.at("children")) kids.push_back(expr_from_json_obj(c));
  if (op == "and") return make_and(std::move(kids));
  if (op == "or") return make_or(std::move(kids));
  if (op == "not") return make_not(kids.at(0));
  if (op == "cmp") {
    const std::string c = j.at("cmp").get<std::string>();
    CmpOp cmp = CmpOp::Eq;
    for (CmpOp o : {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge}) {
      if (cmp_op_text(o) == c) cmp = o;
    }
    return make_compare(cmp, kids.at(0), kids.at(1));
  }
  if (op == "arith") {
    const std::string a = j.at("arith").get<std::string>();
    ArithOp arith = ArithOp::Add;
    for (ArithOp o : {ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div}) {
      if (arith_op_text(o) == a) arith = o;
    }
    return make_arith(arith, kids.at(0), kids.at(1));
  }
  throw ConfigError("unknown expression op in plan json: " + op);
}

PlanPtr plan_from_json_obj(const json& j) {
  const NodeKind kind = node_kind_from_name(j.at("kind").get<std::string>());
  std::vector<PlanPtr> kids;
  if (j.contains("children")) {
    for (const auto& c : j.at("children")) kids.push_back(plan_from_json_obj(c));
  }
  switch (kind) {
    case NodeKind::Scan:
      return make_scan(j.at("table").get<std::string>());
    case NodeKind::Filter:
      return make_filter(expr_from_json_obj(j.at("predicate")), kids.at(0));
    case NodeKind::Project: {
      std::vector<ExprPtr> items;
      for (const auto& it : j.at("items")) items.push_back(expr_from_json_obj(it));
      return make_project(std::move(items), kids.at(0));
    }
    case NodeKind::Join: {
      const JoinType t = j.at("join_type").get<std::string>() == "inner"
                             ? JoinType::Inner
                             : JoinType::Cartesian;
      ExprPtr pred;
      if (j.contains("predicate")) pred = expr_from_json_obj(j.at("predicate"));
      return make_join(t, pred, kids.at(0), kids.at(1));
    }
    case NodeKind::Aggregate: {
      std::vector<AggItem> items;
      for (const auto& o : j.at("select")) {
        AggItem it;
        it.is_call = o.at("is_call").get<bool>();
        if (it.is_call) {
          const std::string f = o.at("fn").get<std::string>();
          for (AggFn g : {AggFn::Count, AggFn::Sum, AggFn::Min, AggFn::Max, AggFn::Avg}) {
            if (agg_fn_name(g) == f) it.call.fn = g;
          }
          it.call.star = o.at("star").get<bool>();
          it.call.table = o.at("table").get<std::string>();
          it.call.column = o.at("column").get<std::string>();
        } else {
          it.table = o.at("table").get<std::string>();
          it.column = o.at("column").get<std::string>();
        }
        items.push_back(it);
      }
      std::vector<std::pair<std::string, std::string>> keys;
      for (const auto& k : j.at("group_keys")) {
        keys.emplace_back(k.at("table").get<std::string>(),
                          k.at("column").get<std::string>());
      }
      return make_aggregate(std::move(items), std::move(keys), kids.at(0));
    }
    case NodeKind::Sort: {
      std::vector<SortKey> keys;
      for (const auto& k : j.at("sort_keys")) {
        keys.push_back({k.at("column").get<std::string>(), k.at("asc").get<bool>()});
      }
      return make_sort(std::move(keys), kids.at(0));
    }
    case NodeKind::Union:
      return make_union(kids.at(0), kids.at(1));
    case NodeKind::Limit:
      return make_limit(j.at("count").get<std::int64_t>(), kids.at(0));
  }
  throw ConfigError("unknown plan node kind in json");
}

}  // namespace

std::string plan_to_json(const PlanPtr& node) {
  return plan_to_json_obj(node).dump();
}

PlanPtr plan_from_json(const std::string& json_text) {
  return plan_from_json_obj(json::parse(json_text));
}

}  // namespace rewriter
