#include "rewriter/cost.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "rewriter/errors.hpp"

namespace rewriter {

namespace {

// Column statistics carried through the estimator: distinct count capped
// by the current row estimate.
struct EstColumn {
  std::string qualifier;
  std::string name;
  ColumnType type{ColumnType::Int};
  double ndv{1.0};
};

struct EstNode {
  std::vector<EstColumn> schema;
  double rows{1.0};
  double cost{0.0};
};

struct Estimator {
  const CatalogStats& stats;
  std::vector<NodeCost>* out;  // preorder slots

  const EstColumn* find_col(const std::vector<EstColumn>& schema,
                            const std::string& table,
                            const std::string& column) const {
    const EstColumn* found = nullptr;
    for (const auto& c : schema) {
      const bool match = table.empty()
                             ? c.name == column
                             : (c.qualifier == table && c.name == column);
      if (!match) continue;
      if (found) throw SchemaMismatch("ambiguous column " + column);
      found = &c;
    }
    if (!found) {
      throw SchemaMismatch("column not found: " +
                           (table.empty() ? column : table + "." + column));
    }
    return found;
  }

  double expr_ndv(const ExprPtr& e, const EstNode& in) const {
    if (e->kind == ExprKind::Column) {
      return find_col(in.schema, e->table, e->column)->ndv;
    }
    return std::max(1.0, in.rows);
  }

  // Selectivity of a predicate over the input.
  double selectivity(const ExprPtr& e, const EstNode& in) const {
    switch (e->kind) {
      case ExprKind::Compare: {
        const ExprPtr& l = e->children[0];
        const ExprPtr& r = e->children[1];
        const double ndv = std::max(
            {1.0,
             l->kind == ExprKind::Column ? expr_ndv(l, in) : 1.0,
             r->kind == ExprKind::Column ? expr_ndv(r, in) : 1.0});
        switch (e->cmp) {
          case CmpOp::Eq: return 1.0 / ndv;
          case CmpOp::Ne: return 1.0 - 1.0 / ndv;
          default: return 1.0 / 3.0;
        }
      }
      case ExprKind::And: {
        double s = 1.0;
        for (const auto& c : e->children) s *= selectivity(c, in);
        return s;
      }
      case ExprKind::Or: {
        double keep = 1.0;
        for (const auto& c : e->children) keep *= 1.0 - selectivity(c, in);
        return 1.0 - keep;
      }
      case ExprKind::Not:
        return 1.0 - selectivity(e->children[0], in);
      default:
        // Bare column / literal treated as an opaque predicate.
        return 1.0 / 3.0;
    }
  }

  EstNode walk(const PlanPtr& node) {
    const std::size_t slot = out->size();
    out->push_back({node_kind_name(node->kind), 0.0, 0.0});
    EstNode r = compute(node);
    r.rows = std::max(1.0, r.rows);
    for (auto& c : r.schema) c.ndv = std::min(c.ndv, r.rows);
    (*out)[slot].estimated_rows = r.rows;
    (*out)[slot].cumulative_cost = r.cost;
    return r;
  }

  EstNode compute(const PlanPtr& node) {
    switch (node->kind) {
      case NodeKind::Scan: {
        const TableStats* t = stats.find_table(node->table);
        if (!t) throw SchemaMismatch("unknown table: " + node->table);
        EstNode n;
        for (const auto& [cname, col] : t->columns) {
          n.schema.push_back({node->table, cname, col.type,
                              static_cast<double>(std::max<std::int64_t>(1, col.ndv))});
        }
        n.rows = static_cast<double>(t->rows);
        n.cost = n.rows;
        return n;
      }
      case NodeKind::Filter: {
        EstNode in = walk(node->children[0]);
        EstNode n;
        n.schema = in.schema;
        n.rows = in.rows * selectivity(node->predicate, in);
        n.cost = in.cost + in.rows;
        return n;
      }
      case NodeKind::Project: {
        EstNode in = walk(node->children[0]);
        EstNode n;
        for (std::size_t i = 0; i < node->items.size(); ++i) {
          const ExprPtr& it = node->items[i];
          if (it->kind == ExprKind::Column) {
            const EstColumn* c = find_col(in.schema, it->table, it->column);
            n.schema.push_back(*c);
          } else {
            n.schema.push_back({"", "expr" + std::to_string(i),
                                ColumnType::Int, in.rows});
          }
        }
        n.rows = in.rows;
        n.cost = in.cost + in.rows;
        return n;
      }
      case NodeKind::Join: {
        EstNode l = walk(node->children[0]);
        EstNode r = walk(node->children[1]);
        EstNode n;
        n.schema = l.schema;
        n.schema.insert(n.schema.end(), r.schema.begin(), r.schema.end());
        if (node->join_type == JoinType::Cartesian) {
          n.rows = l.rows * r.rows;
          n.cost = l.cost + r.cost + n.rows;
          return n;
        }
        // Inner join: each cross-side equality conjunct divides by the
        // larger key ndv; remaining conjuncts filter the result.
        double rows = l.rows * r.rows;
        double residual_sel = 1.0;
        for (const ExprPtr& c : split_conjuncts(node->predicate)) {
          bool equi = false;
          if (c->kind == ExprKind::Compare && c->cmp == CmpOp::Eq &&
              c->children[0]->kind == ExprKind::Column &&
              c->children[1]->kind == ExprKind::Column) {
            auto side_ndv = [&](const Expr& col,
                                const EstNode& side) -> double {
              for (const auto& sc : side.schema) {
                const bool match = col.table.empty()
                                       ? sc.name == col.column
                                       : (sc.qualifier == col.table &&
                                          sc.name == col.column);
                if (match) return sc.ndv;
              }
              return -1.0;
            };
            const double a_l = side_ndv(*c->children[0], l);
            const double a_r = side_ndv(*c->children[0], r);
            const double b_l = side_ndv(*c->children[1], l);
            const double b_r = side_ndv(*c->children[1], r);
            if (a_l > 0 && b_r > 0 && a_r < 0 && b_l < 0) {
              rows /= std::max({1.0, a_l, b_r});
              equi = true;
            } else if (b_l > 0 && a_r > 0 && b_r < 0 && a_l < 0) {
              rows /= std::max({1.0, b_l, a_r});
              equi = true;
            }
          }
          if (!equi) {
            EstNode joined;
            joined.schema = n.schema;
            joined.rows = l.rows * r.rows;
            residual_sel *= selectivity(c, joined);
          }
        }
        n.rows = rows * residual_sel;
        n.cost = l.cost + r.cost + l.rows + r.rows + std::max(1.0, n.rows);
        return n;
      }
      case NodeKind::Aggregate: {
        EstNode in = walk(node->children[0]);
        EstNode n;
        double key_ndv = 1.0;
        for (const auto& [t, c] : node->group_keys) {
          key_ndv *= find_col(in.schema, t, c)->ndv;
        }
        n.rows = node->group_keys.empty() ? 1.0 : std::min(key_ndv, in.rows);
        for (const AggItem& it : node->agg_items) {
          if (it.is_call) {
            ColumnType t = ColumnType::Int;
            if (it.call.fn == AggFn::Avg) t = ColumnType::Double;
            if (!it.call.star && it.call.fn != AggFn::Count &&
                it.call.fn != AggFn::Avg) {
              t = find_col(in.schema, it.call.table, it.call.column)->type;
            }
            n.schema.push_back({"", it.call.output_name(), t, n.rows});
          } else {
            const EstColumn* c = find_col(in.schema, it.table, it.column);
            n.schema.push_back({"", c->name, c->type, c->ndv});
          }
        }
        n.cost = in.cost + in.rows;
        return n;
      }
      case NodeKind::Sort: {
        EstNode in = walk(node->children[0]);
        for (const SortKey& k : node->sort_keys) find_col(in.schema, "", k.column);
        EstNode n;
        n.schema = in.schema;
        n.rows = in.rows;
        n.cost = in.cost + in.rows * std::log2(1.0 + in.rows);
        return n;
      }
      case NodeKind::Union: {
        EstNode l = walk(node->children[0]);
        EstNode r = walk(node->children[1]);
        if (l.schema.size() != r.schema.size()) {
          throw SchemaMismatch("union arity mismatch");
        }
        EstNode n;
        for (std::size_t i = 0; i < l.schema.size(); ++i) {
          n.schema.push_back({"", l.schema[i].name, l.schema[i].type,
                              l.schema[i].ndv + r.schema[i].ndv});
        }
        n.rows = l.rows + r.rows;
        // Concatenation materializes its output rows.
        n.cost = l.cost + r.cost + n.rows;
        return n;
      }
      case NodeKind::Limit: {
        EstNode in = walk(node->children[0]);
        EstNode n;
        n.schema = in.schema;
        n.rows = std::min(static_cast<double>(node->limit_count), in.rows);
        n.cost = in.cost + std::max(1.0, n.rows);
        return n;
      }
    }
    throw SchemaMismatch("unreachable node kind");
  }
};

}  // namespace

std::string CostReport::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : per_node) {
    nodes.push_back({{"kind", n.kind},
                     {"estimated_rows", n.estimated_rows},
                     {"cumulative_cost", n.cumulative_cost}});
  }
  return nlohmann::json{{"total_cost", total_cost}, {"nodes", nodes}}.dump();
}

CostReport estimate(const QueryTree& tree, const CatalogStats& stats) {
  CostReport report;
  Estimator est{stats, &report.per_node};
  EstNode root = est.walk(tree.root);
  report.total_cost = root.cost;
  return report;
}

double EstimatorBackend::cost(const QueryTree& tree) const {
  return std::max(1.0, estimate(tree, stats_).total_cost);
}

InterpreterBackend::InterpreterBackend(CatalogStats stats, std::uint64_t seed,
                                       int databases)
    : stats_(std::move(stats)) {
  for (int i = 0; i < databases; ++i) {
    seeds_.push_back(seed + static_cast<std::uint64_t>(i));
    databases_.push_back(generate_toy_database(stats_, seeds_.back()));
  }
}

double InterpreterBackend::cost(const QueryTree& tree) const {
  double total = 0.0;
  for (const auto& db : databases_) {
    total += static_cast<double>(execute(tree, db).work_units);
  }
  return std::max(1.0, total / static_cast<double>(databases_.size()));
}

double improved_margin(const QueryTree& original, const QueryTree& rewritten,
                       const CostBackend& backend) {
  return backend.cost(original) / backend.cost(rewritten);
}

double capped_cost(const QueryTree& tree, const CostBackend& backend,
                   double cap) {
  return std::min(backend.cost(tree), cap);
}

}  // namespace rewriter
