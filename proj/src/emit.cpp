#include "rewriter/emit.hpp"

#include <algorithm>

#include "rewriter/errors.hpp"

namespace rewriter {

namespace {

std::string emit_statement(const PlanPtr& node);

bool is_core_head(const PlanNode& n) {
  return n.kind == NodeKind::Project || n.kind == NodeKind::Aggregate;
}

std::string emit_from(const PlanPtr& node) {
  switch (node->kind) {
    case NodeKind::Scan:
      return node->table;
    case NodeKind::Join: {
      std::string l = emit_from(node->children[0]);
      std::string r = emit_from(node->children[1]);
      if (node->join_type == JoinType::Cartesian) {
        return l + ", " + r;
      }
      return l + " INNER JOIN " + r + " ON " + expr_to_text(node->predicate);
    }
    default:
      throw EmitError(node_kind_name(node->kind) + " inside FROM");
  }
}

std::string agg_item_text(const AggItem& it) {
  if (it.is_call) {
    if (it.call.star) return agg_fn_name(it.call.fn) + "(*)";
    std::string arg = it.call.table.empty()
                          ? it.call.column
                          : it.call.table + "." + it.call.column;
    return agg_fn_name(it.call.fn) + "(" + arg + ")";
  }
  return it.table.empty() ? it.column : it.table + "." + it.column;
}

std::string emit_core(const PlanPtr& head) {
  std::string select_list;
  PlanPtr below;

  if (head->kind == NodeKind::Project) {
    for (std::size_t i = 0; i < head->items.size(); ++i) {
      if (i) select_list += ", ";
      select_list += expr_to_text(head->items[i]);
    }
    below = head->children[0];
  } else if (head->kind == NodeKind::Aggregate) {
    for (std::size_t i = 0; i < head->agg_items.size(); ++i) {
      if (i) select_list += ", ";
      select_list += agg_item_text(head->agg_items[i]);
    }
    below = head->children[0];
    // The canonical input projection of an aggregate is implicit in the
    // rendered text; skip it when it is column-only.
    if (below->kind == NodeKind::Project) {
      const bool column_only =
          std::all_of(below->items.begin(), below->items.end(),
                      [](const ExprPtr& e) { return e->kind == ExprKind::Column; });
      if (!column_only) {
        throw EmitError("aggregate over an expression projection");
      }
      below = below->children[0];
    }
  } else {
    throw EmitError("core without Project or Aggregate head");
  }

  // Stacked filters render as one WHERE with the bottom predicate first
  // (matching the order FILTER_MERGE would conjoin them).
  std::vector<ExprPtr> filters;
  while (below->kind == NodeKind::Filter) {
    filters.push_back(below->predicate);
    below = below->children[0];
  }

  std::string out = "SELECT " + select_list + " FROM " + emit_from(below);
  if (!filters.empty()) {
    ExprPtr pred = filters.size() == 1
                       ? filters[0]
                       : make_and(std::vector<ExprPtr>(filters.rbegin(),
                                                       filters.rend()));
    out += " WHERE " + expr_to_text(pred);
  }
  if (head->kind == NodeKind::Aggregate && !head->group_keys.empty()) {
    out += " GROUP BY ";
    for (std::size_t i = 0; i < head->group_keys.size(); ++i) {
      if (i) out += ", ";
      const auto& [t, c] = head->group_keys[i];
      out += t.empty() ? c : t + "." + c;
    }
  }
  return out;
}

std::string emit_union_branch(const PlanPtr& node) {
  if (is_core_head(*node)) return emit_core(node);
  // Branches carrying their own Sort/Limit (or nested unions on the
  // right) need parentheses to round-trip.
  return "(" + emit_statement(node) + ")";
}

std::string emit_body(const PlanPtr& node) {
  if (node->kind == NodeKind::Union) {
    const PlanPtr& l = node->children[0];
    const PlanPtr& r = node->children[1];
    std::string lt = l->kind == NodeKind::Union ? emit_body(l)
                                                : emit_union_branch(l);
    std::string rt = emit_union_branch(r);
    return lt + " UNION ALL " + rt;
  }
  return emit_core(node);
}

std::string emit_statement(const PlanPtr& node) {
  PlanPtr cur = node;
  std::string tail;
  if (cur->kind == NodeKind::Limit) {
    tail = " LIMIT " + std::to_string(cur->limit_count);
    cur = cur->children[0];
  }
  if (cur->kind == NodeKind::Sort) {
    std::string keys;
    for (std::size_t i = 0; i < cur->sort_keys.size(); ++i) {
      if (i) keys += ", ";
      keys += cur->sort_keys[i].column;
      if (!cur->sort_keys[i].asc) keys += " DESC";
    }
    tail = " ORDER BY " + keys + tail;
    cur = cur->children[0];
  }
  if (cur->kind == NodeKind::Sort || cur->kind == NodeKind::Limit) {
    throw EmitError("stacked Sort/Limit at statement head");
  }
  return emit_body(cur) + tail;
}

}  // namespace

std::string emit(const QueryTree& tree) {
  if (!tree.root) throw EmitError("empty tree");
  return emit_statement(tree.root);
}

}  // namespace rewriter
