#include "rewriter/rules.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>

#include "rewriter/errors.hpp"

namespace rewriter {

const std::vector<RewriteRule>& rule_registry() {
  static const std::vector<RewriteRule> kRules = {
      {"FILTER_INTO_JOIN",
       "push filter expressions into a join condition"},
      {"JOIN_EXTRACT_FILTER",
       "convert an inner join into a filter above a cartesian join"},
      {"SORT_UNION_TRANSPOSE",
       "pushes a Sort past a Union"},
      {"AGGREGATE_UNION_AGGREGATE",
       "split an aggregate above a union into per-branch partial aggregates"},
      {"AGGREGATE_PROJECT_MERGE",
       "merge an aggregate with the column-only projection beneath it"},
      {"FILTER_MERGE",
       "merge two stacked filters into a single conjunctive filter"},
      {"PROJECT_MERGE",
       "merge a projection into the column-only projection beneath it"},
      {"FILTER_PROJECT_TRANSPOSE",
       "push a filter below a projection"},
      {"SORT_REMOVE",
       "remove a sort whose input is already ordered or has at most one row"},
      {"EMPTY",
       "keep the query unchanged when no rewrite applies"},
  };
  return kRules;
}

bool is_registry_rule(const std::string& name) {
  for (const auto& r : rule_registry()) {
    if (r.name == name) return true;
  }
  return false;
}

std::string render_registry() {
  std::string out;
  for (const auto& r : rule_registry()) {
    out += "- " + r.name + ": " + r.description + "\n";
  }
  return out;
}

namespace {

using Matcher = std::function<std::optional<PlanPtr>(const PlanPtr&)>;

// Rebuilds the tree with the first (preorder) match transformed.
std::optional<PlanPtr> apply_first(const PlanPtr& node, const Matcher& m) {
  if (auto r = m(node)) return r;
  for (std::size_t i = 0; i < node->children.size(); ++i) {
    if (auto r = apply_first(node->children[i], m)) {
      std::vector<PlanPtr> kids = node->children;
      kids[i] = *r;
      return clone_with_children(*node, std::move(kids));
    }
  }
  return std::nullopt;
}

bool column_in_tables(const Expr& col, const std::set<std::string>& tables) {
  return !col.table.empty() && tables.count(col.table) > 0;
}

// Classifies a conjunct against the two sides of a join. Only qualified
// references are attributed; anything else is left untouched.
enum class Side { Left, Right, Cross, Unknown };

Side conjunct_side(const ExprPtr& conjunct, const std::set<std::string>& left,
                   const std::set<std::string>& right) {
  std::vector<const Expr*> cols;
  collect_columns(conjunct, cols);
  bool any_left = false, any_right = false, any_unknown = false;
  for (const Expr* c : cols) {
    if (column_in_tables(*c, left)) any_left = true;
    else if (column_in_tables(*c, right)) any_right = true;
    else any_unknown = true;
  }
  if (any_unknown) return Side::Unknown;
  if (any_left && any_right) return Side::Cross;
  if (any_left) return Side::Left;
  if (any_right) return Side::Right;
  return Side::Unknown;
}

std::set<std::string> table_set(const PlanPtr& n) {
  auto v = scan_tables(n);
  return std::set<std::string>(v.begin(), v.end());
}

// FILTER_INTO_JOIN: move cross-side conjuncts of a filter directly above a
// join into the join condition (the join becomes inner); one-side and
// unattributable conjuncts stay in the residual filter.
std::optional<PlanPtr> filter_into_join(const PlanPtr& n) {
  if (n->kind != NodeKind::Filter) return std::nullopt;
  const PlanPtr& join = n->children[0];
  if (join->kind != NodeKind::Join) return std::nullopt;

  const std::set<std::string> left = table_set(join->children[0]);
  const std::set<std::string> right = table_set(join->children[1]);

  std::vector<ExprPtr> movable, residual;
  for (const ExprPtr& c : split_conjuncts(n->predicate)) {
    if (conjunct_side(c, left, right) == Side::Cross) movable.push_back(c);
    else residual.push_back(c);
  }
  if (movable.empty()) return std::nullopt;

  std::vector<ExprPtr> cond_parts;
  if (join->join_type == JoinType::Inner && join->predicate) {
    cond_parts.push_back(join->predicate);
  }
  cond_parts.insert(cond_parts.end(), movable.begin(), movable.end());
  ExprPtr cond = cond_parts.size() == 1 ? cond_parts[0]
                                        : make_and(std::move(cond_parts));
  PlanPtr new_join =
      make_join(JoinType::Inner, cond, join->children[0], join->children[1]);
  if (residual.empty()) return new_join;
  ExprPtr res = residual.size() == 1 ? residual[0] : make_and(std::move(residual));
  return make_filter(res, new_join);
}

// JOIN_EXTRACT_FILTER: turn the inner join heading a core's FROM into a
// filter above a cartesian join. Matches on the join's parent so the new
// filter lands in WHERE position.
std::optional<PlanPtr> join_extract_filter(const PlanPtr& n) {
  if (n->kind != NodeKind::Filter && n->kind != NodeKind::Project &&
      n->kind != NodeKind::Aggregate) {
    return std::nullopt;
  }
  const PlanPtr& child = n->children[0];
  if (child->kind != NodeKind::Join || child->join_type != JoinType::Inner) {
    return std::nullopt;
  }
  PlanPtr cart = make_join(JoinType::Cartesian, nullptr, child->children[0],
                           child->children[1]);
  PlanPtr filtered = make_filter(child->predicate, cart);
  std::vector<PlanPtr> kids{filtered};
  return clone_with_children(*n, std::move(kids));
}

// SORT_UNION_TRANSPOSE: duplicate a sort above a union into both branches,
// keeping the outer sort. Skipped when a branch already carries a sort or
// limit (re-application guard and emit-shape guard in one).
std::optional<PlanPtr> sort_union_transpose(const PlanPtr& n) {
  if (n->kind != NodeKind::Sort) return std::nullopt;
  const PlanPtr& u = n->children[0];
  if (u->kind != NodeKind::Union) return std::nullopt;
  for (const PlanPtr& b : u->children) {
    if (b->kind == NodeKind::Sort || b->kind == NodeKind::Limit) {
      return std::nullopt;
    }
  }
  PlanPtr l = make_sort(n->sort_keys, u->children[0]);
  PlanPtr r = make_sort(n->sort_keys, u->children[1]);
  return make_sort(n->sort_keys, make_union(l, r));
}

bool decomposable(AggFn fn) {
  return fn == AggFn::Count || fn == AggFn::Sum || fn == AggFn::Min ||
         fn == AggFn::Max;
}

// AGGREGATE_UNION_AGGREGATE: push partial aggregates into both union
// branches and combine above (COUNT -> SUM of partial counts, SUM/MIN/MAX
// -> same over partials). Grouped aggregates only; AVG is not
// decomposable without auxiliary columns.
std::optional<PlanPtr> aggregate_union_aggregate(const PlanPtr& n) {
  if (n->kind != NodeKind::Aggregate) return std::nullopt;
  const PlanPtr& u = n->children[0];
  if (u->kind != NodeKind::Union) return std::nullopt;
  if (n->group_keys.empty()) return std::nullopt;
  for (const AggItem& it : n->agg_items) {
    if (it.is_call && !decomposable(it.call.fn)) return std::nullopt;
  }
  // Already split: both branches are aggregates with the same keys.
  const auto is_partial = [&](const PlanPtr& b) {
    return b->kind == NodeKind::Aggregate && b->group_keys == n->group_keys;
  };
  if (is_partial(u->children[0]) && is_partial(u->children[1])) {
    return std::nullopt;
  }

  // Partial aggregate: group keys first, then one call per top-level call.
  std::vector<AggItem> partial_items;
  for (const auto& [t, c] : n->group_keys) {
    AggItem k;
    k.is_call = false;
    k.table = t;
    k.column = c;
    partial_items.push_back(k);
  }
  std::vector<AggCall> calls;
  for (const AggItem& it : n->agg_items) {
    if (it.is_call) calls.push_back(it.call);
  }
  for (const AggCall& c : calls) {
    AggItem a;
    a.is_call = true;
    a.call = c;
    partial_items.push_back(a);
  }

  PlanPtr pl = make_aggregate(partial_items, n->group_keys, u->children[0]);
  PlanPtr pr = make_aggregate(partial_items, n->group_keys, u->children[1]);
  PlanPtr nu = make_union(pl, pr);

  // Combining aggregate: keys keep their (now unqualified) names; calls
  // consume the partial output columns.
  std::vector<std::pair<std::string, std::string>> top_keys;
  for (const auto& [t, c] : n->group_keys) {
    (void)t;
    top_keys.emplace_back("", c);
  }
  std::vector<AggItem> top_items;
  for (const AggItem& it : n->agg_items) {
    if (!it.is_call) {
      AggItem k;
      k.is_call = false;
      k.table = "";
      k.column = it.column;
      top_items.push_back(k);
      continue;
    }
    AggItem a;
    a.is_call = true;
    a.call.star = false;
    a.call.table = "";
    a.call.column = it.call.output_name();
    switch (it.call.fn) {
      case AggFn::Count: a.call.fn = AggFn::Sum; break;
      case AggFn::Sum: a.call.fn = AggFn::Sum; break;
      case AggFn::Min: a.call.fn = AggFn::Min; break;
      case AggFn::Max: a.call.fn = AggFn::Max; break;
      default: return std::nullopt;
    }
    top_items.push_back(a);
  }
  return make_aggregate(std::move(top_items), std::move(top_keys), nu);
}

bool column_only_project(const PlanNode& p) {
  return p.kind == NodeKind::Project &&
         std::all_of(p.items.begin(), p.items.end(), [](const ExprPtr& e) {
           return e->kind == ExprKind::Column;
         });
}

// Maps a reference by unqualified output name to the project item that
// produces it; nullptr when absent or ambiguous.
const Expr* project_source(const PlanNode& project, const std::string& table,
                           const std::string& column) {
  const Expr* found = nullptr;
  for (const auto& it : project.items) {
    if (it->kind != ExprKind::Column) continue;
    const bool match = table.empty() ? it->column == column
                                     : (it->table == table || it->table.empty()
                                            ? it->column == column
                                            : false);
    if (!match) continue;
    if (found != nullptr) return nullptr;
    found = it.get();
  }
  return found;
}

// AGGREGATE_PROJECT_MERGE: drop a column-only projection feeding an
// aggregate when every referenced column can be attributed unambiguously
// (single scan below, or fully qualified references).
std::optional<PlanPtr> aggregate_project_merge(const PlanPtr& n) {
  if (n->kind != NodeKind::Aggregate) return std::nullopt;
  const PlanPtr& p = n->children[0];
  if (!p || !column_only_project(*p)) return std::nullopt;

  // Unqualified project items can only be re-attributed safely when a
  // single scan table sits below.
  const bool single_table = scan_tables(p->children[0]).size() == 1;
  auto ref_ok = [&](const std::string& t, const std::string& c) {
    const Expr* src = project_source(*p, t, c);
    if (src == nullptr) return false;
    return single_table || !src->table.empty();
  };
  auto mapped_ref = [&](const std::string& t, const std::string& c)
      -> std::pair<std::string, std::string> {
    const Expr* src = project_source(*p, t, c);
    return {src->table, src->column};
  };

  for (const auto& [t, c] : n->group_keys) {
    if (!ref_ok(t, c)) return std::nullopt;
  }
  for (const AggItem& it : n->agg_items) {
    if (it.is_call && !it.call.star && !ref_ok(it.call.table, it.call.column)) {
      return std::nullopt;
    }
    if (!it.is_call && !ref_ok(it.table, it.column)) return std::nullopt;
  }

  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& [t, c] : n->group_keys) keys.push_back(mapped_ref(t, c));
  std::vector<AggItem> items;
  for (const AggItem& it : n->agg_items) {
    AggItem a = it;
    if (it.is_call && !it.call.star) {
      auto [mt, mc] = mapped_ref(it.call.table, it.call.column);
      a.call.table = mt;
      a.call.column = mc;
    } else if (!it.is_call) {
      auto [mt, mc] = mapped_ref(it.table, it.column);
      a.table = mt;
      a.column = mc;
    }
    items.push_back(a);
  }
  return make_aggregate(std::move(items), std::move(keys), p->children[0]);
}

// FILTER_MERGE: collapse Filter over Filter, bottom conjuncts first.
std::optional<PlanPtr> filter_merge(const PlanPtr& n) {
  if (n->kind != NodeKind::Filter) return std::nullopt;
  const PlanPtr& below = n->children[0];
  if (below->kind != NodeKind::Filter) return std::nullopt;
  std::vector<ExprPtr> parts = split_conjuncts(below->predicate);
  for (const ExprPtr& c : split_conjuncts(n->predicate)) parts.push_back(c);
  return make_filter(make_and(std::move(parts)), below->children[0]);
}

// PROJECT_MERGE: substitute a projection through the column-only
// projection beneath it.
std::optional<PlanPtr> project_merge(const PlanPtr& n) {
  if (n->kind != NodeKind::Project) return std::nullopt;
  const PlanPtr& p = n->children[0];
  if (!p || !column_only_project(*p)) return std::nullopt;

  bool ok = true;
  std::vector<ExprPtr> items;
  for (const ExprPtr& it : n->items) {
    ExprPtr mapped = map_columns(it, [&](const Expr& col) -> ExprPtr {
      const Expr* src = project_source(*p, col.table, col.column);
      if (src == nullptr) {
        ok = false;
        return make_column(col.table, col.column);
      }
      return make_column(src->table, src->column);
    });
    if (!ok) return std::nullopt;
    items.push_back(mapped);
  }
  return make_project(std::move(items), p->children[0]);
}

// FILTER_PROJECT_TRANSPOSE: push a filter below a column-only projection,
// rewriting its references through the projection.
std::optional<PlanPtr> filter_project_transpose(const PlanPtr& n) {
  if (n->kind != NodeKind::Filter) return std::nullopt;
  const PlanPtr& p = n->children[0];
  if (!p || !column_only_project(*p)) return std::nullopt;

  bool ok = true;
  ExprPtr pushed = map_columns(n->predicate, [&](const Expr& col) -> ExprPtr {
    const Expr* src = project_source(*p, col.table, col.column);
    if (src == nullptr) {
      ok = false;
      return make_column(col.table, col.column);
    }
    return make_column(src->table, src->column);
  });
  if (!ok) return std::nullopt;
  return make_project(p->items, make_filter(pushed, p->children[0]));
}

bool sort_prefix_of(const std::vector<SortKey>& prefix,
                    const std::vector<SortKey>& full) {
  if (prefix.size() > full.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i].column != full[i].column || prefix[i].asc != full[i].asc) {
      return false;
    }
  }
  return true;
}

// SORT_REMOVE: drop a sort whose input is already ordered by a key prefix
// or can produce at most one row.
std::optional<PlanPtr> sort_remove(const PlanPtr& n) {
  if (n->kind != NodeKind::Sort) return std::nullopt;
  const PlanPtr& child = n->children[0];
  if (child->kind == NodeKind::Sort &&
      sort_prefix_of(n->sort_keys, child->sort_keys)) {
    return child;
  }
  if (child->kind == NodeKind::Aggregate && child->group_keys.empty()) {
    return child;
  }
  if (child->kind == NodeKind::Limit && child->limit_count <= 1) {
    return child;
  }
  return std::nullopt;
}

Matcher matcher_for(const std::string& name) {
  if (name == "FILTER_INTO_JOIN") return filter_into_join;
  if (name == "JOIN_EXTRACT_FILTER") return join_extract_filter;
  if (name == "SORT_UNION_TRANSPOSE") return sort_union_transpose;
  if (name == "AGGREGATE_UNION_AGGREGATE") return aggregate_union_aggregate;
  if (name == "AGGREGATE_PROJECT_MERGE") return aggregate_project_merge;
  if (name == "FILTER_MERGE") return filter_merge;
  if (name == "PROJECT_MERGE") return project_merge;
  if (name == "FILTER_PROJECT_TRANSPOSE") return filter_project_transpose;
  if (name == "SORT_REMOVE") return sort_remove;
  return nullptr;
}

}  // namespace

ApplyResult apply_rule(const QueryTree& tree, const std::string& rule_name) {
  if (!is_registry_rule(rule_name)) throw UnknownRule(rule_name);
  if (rule_name == "EMPTY") return {tree, true};
  Matcher m = matcher_for(rule_name);
  if (auto r = apply_first(tree.root, m)) {
    return {QueryTree{*r}, true};
  }
  return {tree, false};
}

SequenceResult apply_sequence(const QueryTree& tree, const RuleSequence& rules) {
  SequenceResult out;
  out.tree = tree;
  for (const std::string& name : rules) {
    ApplyResult r = apply_rule(out.tree, name);
    out.tree = r.tree;
    out.applied.emplace_back(name, r.matched);
  }
  return out;
}

}  // namespace rewriter
