#include "rewriter/toydb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "rewriter/errors.hpp"

namespace rewriter {

const ToyTable* ToyDatabase::find_table(const std::string& name) const {
  auto it = tables.find(name);
  return it == tables.end() ? nullptr : &it->second;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, const std::string& salt) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (char c : salt) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

ToyDatabase generate_toy_database(const CatalogStats& catalog,
                                  std::uint64_t seed, std::int64_t max_rows) {
  ToyDatabase db;
  for (const auto& [tname, stats] : catalog.tables) {
    ToyTable table;
    const std::int64_t n = std::min<std::int64_t>(stats.rows, max_rows);
    std::mt19937_64 rng(mix_seed(seed, tname));
    for (const auto& [cname, col] : stats.columns) {
      table.columns.emplace_back(cname, col.type);
    }
    table.rows.assign(static_cast<std::size_t>(n), Row{});
    std::size_t ci = 0;
    for (const auto& [cname, col] : stats.columns) {
      std::mt19937_64 crng(mix_seed(rng(), cname));
      const std::int64_t ndv = std::max<std::int64_t>(1, std::min(col.ndv, n));
      if (col.type == ColumnType::Int) {
        if (col.ndv >= stats.rows && n > 1) {
          // Key-like column: dense shuffled range anchored at min.
          std::vector<std::int64_t> vals(static_cast<std::size_t>(n));
          std::iota(vals.begin(), vals.end(), col.min_value);
          std::shuffle(vals.begin(), vals.end(), crng);
          for (std::int64_t r = 0; r < n; ++r) {
            table.rows[r].push_back(vals[static_cast<std::size_t>(r)]);
          }
        } else {
          const std::int64_t span = std::max<std::int64_t>(
              1, col.max_value - col.min_value + 1);
          const std::int64_t domain = std::min(ndv, span);
          std::uniform_int_distribution<std::int64_t> d(0, domain - 1);
          for (std::int64_t r = 0; r < n; ++r) {
            table.rows[r].push_back(col.min_value + d(crng));
          }
        }
      } else if (col.type == ColumnType::Double) {
        // Half-integer grid keeps equality comparisons meaningful.
        std::uniform_int_distribution<std::int64_t> d(2 * col.min_value,
                                                      2 * col.max_value);
        for (std::int64_t r = 0; r < n; ++r) {
          table.rows[r].push_back(static_cast<double>(d(crng)) / 2.0);
        }
      } else {
        std::uniform_int_distribution<std::int64_t> d(0, ndv - 1);
        for (std::int64_t r = 0; r < n; ++r) {
          table.rows[r].push_back("s" + std::to_string(d(crng)));
        }
      }
      ++ci;
    }
    (void)ci;
    db.tables.emplace(tname, std::move(table));
  }
  return db;
}

namespace {

struct EvalNode {
  Schema schema;
  std::vector<Row> rows;
};

struct Executor {
  const ToyDatabase& db;
  std::int64_t work{0};

  // Resolution against runtime schemas mirrors output_schema but binds
  // column positions.
  static std::size_t resolve_index(const Schema& schema, const std::string& table,
                                   const std::string& column) {
    std::size_t found = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const OutColumn& c = schema[i];
      const bool match = table.empty()
                             ? c.name == column
                             : (c.qualifier == table && c.name == column);
      if (!match) continue;
      if (found != static_cast<std::size_t>(-1)) {
        throw SchemaMismatch("ambiguous column " + column);
      }
      found = i;
    }
    if (found == static_cast<std::size_t>(-1)) {
      throw SchemaMismatch("column not found: " +
                           (table.empty() ? column : table + "." + column));
    }
    return found;
  }

  static std::string row_context(const Row& row) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ", ";
      os << value_to_text(row[i]);
    }
    os << ")";
    return os.str();
  }

  Value eval_expr(const ExprPtr& e, const Schema& schema, const Row& row) {
    switch (e->kind) {
      case ExprKind::Column:
        return row[resolve_index(schema, e->table, e->column)];
      case ExprKind::Literal:
        return e->literal;
      case ExprKind::Compare: {
        Value l = eval_expr(e->children[0], schema, row);
        Value r = eval_expr(e->children[1], schema, row);
        if (value_is_numeric(l) != value_is_numeric(r)) {
          throw SchemaMismatch("comparing string with numeric");
        }
        bool res = false;
        const bool numeric = value_is_numeric(l);
        int c;
        if (numeric) {
          const double dl = value_as_double(l);
          const double dr = value_as_double(r);
          c = dl < dr ? -1 : (dl > dr ? 1 : 0);
        } else {
          c = value_compare(l, r);
        }
        switch (e->cmp) {
          case CmpOp::Eq: res = c == 0; break;
          case CmpOp::Ne: res = c != 0; break;
          case CmpOp::Lt: res = c < 0; break;
          case CmpOp::Le: res = c <= 0; break;
          case CmpOp::Gt: res = c > 0; break;
          case CmpOp::Ge: res = c >= 0; break;
        }
        return static_cast<std::int64_t>(res ? 1 : 0);
      }
      case ExprKind::Arith: {
        Value l = eval_expr(e->children[0], schema, row);
        Value r = eval_expr(e->children[1], schema, row);
        if (!value_is_numeric(l) || !value_is_numeric(r)) {
          throw SchemaMismatch("arithmetic over string value");
        }
        const bool as_double = std::holds_alternative<double>(l) ||
                               std::holds_alternative<double>(r);
        if (e->arith == ArithOp::Div) {
          const double dr = value_as_double(r);
          if (dr == 0.0) throw DivisionByZero(row_context(row));
          if (as_double) return value_as_double(l) / dr;
          return std::get<std::int64_t>(l) / std::get<std::int64_t>(r);
        }
        if (as_double) {
          const double dl = value_as_double(l);
          const double dr = value_as_double(r);
          switch (e->arith) {
            case ArithOp::Add: return dl + dr;
            case ArithOp::Sub: return dl - dr;
            case ArithOp::Mul: return dl * dr;
            default: break;
          }
        }
        const std::int64_t il = std::get<std::int64_t>(l);
        const std::int64_t ir = std::get<std::int64_t>(r);
        switch (e->arith) {
          case ArithOp::Add: return il + ir;
          case ArithOp::Sub: return il - ir;
          case ArithOp::Mul: return il * ir;
          default: break;
        }
        return std::int64_t{0};
      }
      case ExprKind::And: {
        for (const auto& c : e->children) {
          if (!truthy(eval_expr(c, schema, row))) return std::int64_t{0};
        }
        return std::int64_t{1};
      }
      case ExprKind::Or: {
        for (const auto& c : e->children) {
          if (truthy(eval_expr(c, schema, row))) return std::int64_t{1};
        }
        return std::int64_t{0};
      }
      case ExprKind::Not:
        return static_cast<std::int64_t>(
            truthy(eval_expr(e->children[0], schema, row)) ? 0 : 1);
      case ExprKind::AggCall:
        throw SchemaMismatch("aggregate call evaluated per-row");
    }
    return std::int64_t{0};
  }

  static bool truthy(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v)) {
      return std::get<std::int64_t>(v) != 0;
    }
    if (std::holds_alternative<double>(v)) return std::get<double>(v) != 0.0;
    return !std::get<std::string>(v).empty();
  }

  EvalNode eval(const PlanPtr& node) {
    switch (node->kind) {
      case NodeKind::Scan: {
        const ToyTable* t = db.find_table(node->table);
        if (t == nullptr) throw SchemaMismatch("no table " + node->table);
        EvalNode out;
        for (const auto& [name, type] : t->columns) {
          out.schema.push_back({node->table, name, type});
        }
        out.rows = t->rows;
        work += static_cast<std::int64_t>(t->rows.size());
        return out;
      }
      case NodeKind::Filter: {
        EvalNode in = eval(node->children[0]);
        EvalNode out;
        out.schema = in.schema;
        for (const Row& r : in.rows) {
          if (truthy(eval_expr(node->predicate, in.schema, r))) {
            out.rows.push_back(r);
          }
        }
        work += static_cast<std::int64_t>(out.rows.size());
        return out;
      }
      case NodeKind::Project: {
        EvalNode in = eval(node->children[0]);
        EvalNode out;
        for (std::size_t i = 0; i < node->items.size(); ++i) {
          const ExprPtr& it = node->items[i];
          if (it->kind == ExprKind::Column) {
            const std::size_t idx = resolve_index(in.schema, it->table, it->column);
            out.schema.push_back(in.schema[idx]);
          } else {
            out.schema.push_back({"", "expr" + std::to_string(i), ColumnType::Int});
          }
        }
        for (const Row& r : in.rows) {
          Row o;
          o.reserve(node->items.size());
          for (const auto& it : node->items) {
            o.push_back(eval_expr(it, in.schema, r));
          }
          out.rows.push_back(std::move(o));
        }
        work += static_cast<std::int64_t>(out.rows.size());
        return out;
      }
      case NodeKind::Join:
        return eval_join(node);
      case NodeKind::Aggregate:
        return eval_aggregate(node);
      case NodeKind::Sort: {
        EvalNode in = eval(node->children[0]);
        std::vector<std::size_t> key_idx;
        for (const SortKey& k : node->sort_keys) {
          key_idx.push_back(resolve_index(in.schema, "", k.column));
        }
        std::stable_sort(in.rows.begin(), in.rows.end(),
                         [&](const Row& a, const Row& b) {
                           for (std::size_t i = 0; i < key_idx.size(); ++i) {
                             const int c =
                                 value_compare(a[key_idx[i]], b[key_idx[i]]);
                             if (c != 0) {
                               return node->sort_keys[i].asc ? c < 0 : c > 0;
                             }
                           }
                           return false;
                         });
        work += static_cast<std::int64_t>(in.rows.size());
        return in;
      }
      case NodeKind::Union: {
        EvalNode l = eval(node->children[0]);
        EvalNode r = eval(node->children[1]);
        if (l.schema.size() != r.schema.size()) {
          throw SchemaMismatch("union arity mismatch");
        }
        EvalNode out;
        for (const auto& c : l.schema) out.schema.push_back({"", c.name, c.type});
        out.rows = std::move(l.rows);
        out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
        work += static_cast<std::int64_t>(out.rows.size());
        return out;
      }
      case NodeKind::Limit: {
        EvalNode in = eval(node->children[0]);
        const std::size_t keep = std::min<std::size_t>(
            in.rows.size(), static_cast<std::size_t>(node->limit_count));
        in.rows.resize(keep);
        work += static_cast<std::int64_t>(in.rows.size());
        return in;
      }
    }
    throw SchemaMismatch("unreachable node kind");
  }

  EvalNode eval_join(const PlanPtr& node) {
    EvalNode l = eval(node->children[0]);
    EvalNode r = eval(node->children[1]);
    EvalNode out;
    out.schema = l.schema;
    out.schema.insert(out.schema.end(), r.schema.begin(), r.schema.end());

    auto concat = [](const Row& a, const Row& b) {
      Row o = a;
      o.insert(o.end(), b.begin(), b.end());
      return o;
    };

    if (node->join_type == JoinType::Cartesian) {
      out.rows.reserve(l.rows.size() * r.rows.size());
      for (const Row& lr : l.rows) {
        for (const Row& rr : r.rows) {
          out.rows.push_back(concat(lr, rr));
        }
      }
      work += static_cast<std::int64_t>(out.rows.size());
      return out;
    }

    // Split the condition into cross-side equality conjuncts (hash keys)
    // and a residual evaluated on the combined row.
    struct EquiPair { std::size_t li, ri; };
    std::vector<EquiPair> equi;
    std::vector<ExprPtr> residual;
    for (const ExprPtr& c : split_conjuncts(node->predicate)) {
      bool used = false;
      if (c->kind == ExprKind::Compare && c->cmp == CmpOp::Eq &&
          c->children[0]->kind == ExprKind::Column &&
          c->children[1]->kind == ExprKind::Column) {
        const Expr& a = *c->children[0];
        const Expr& b = *c->children[1];
        auto try_side = [&](const Expr& x, const Schema& s) -> std::optional<std::size_t> {
          try {
            return resolve_index(s, x.table, x.column);
          } catch (const SchemaMismatch&) {
            return std::nullopt;
          }
        };
        auto al = try_side(a, l.schema), ar = try_side(a, r.schema);
        auto bl = try_side(b, l.schema), br = try_side(b, r.schema);
        if (al && br && !ar && !bl) {
          equi.push_back({*al, *br});
          used = true;
        } else if (bl && ar && !br && !al) {
          equi.push_back({*bl, *ar});
          used = true;
        }
      }
      if (!used) residual.push_back(c);
    }

    auto residual_ok = [&](const Row& row) {
      for (const ExprPtr& c : residual) {
        if (!truthy(eval_expr(c, out.schema, row))) return false;
      }
      return true;
    };

    if (equi.empty()) {
      for (const Row& lr : l.rows) {
        for (const Row& rr : r.rows) {
          Row row = concat(lr, rr);
          if (residual_ok(row)) out.rows.push_back(std::move(row));
        }
      }
    } else {
      // Hash partition the right side; probe in left order so output
      // order is deterministic. Key comparison must agree with Eq
      // semantics (int 5 matches double 5.0).
      auto key_lt = [](const std::vector<Value>& a, const std::vector<Value>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
          const bool na = value_is_numeric(a[i]);
          const bool nb = value_is_numeric(b[i]);
          if (na != nb) return na;
          if (na) {
            const double da = value_as_double(a[i]);
            const double db = value_as_double(b[i]);
            if (da != db) return da < db;
          } else {
            const auto& sa = std::get<std::string>(a[i]);
            const auto& sb = std::get<std::string>(b[i]);
            if (sa != sb) return sa < sb;
          }
        }
        return false;
      };
      std::map<std::vector<Value>, std::vector<std::size_t>, decltype(key_lt)>
          buckets(key_lt);
      auto key_of = [&](const Row& row, bool left) {
        std::vector<Value> key;
        key.reserve(equi.size());
        for (const auto& e : equi) key.push_back(row[left ? e.li : e.ri]);
        return key;
      };
      for (std::size_t i = 0; i < r.rows.size(); ++i) {
        buckets[key_of(r.rows[i], false)].push_back(i);
      }
      for (const Row& lr : l.rows) {
        auto it = buckets.find(key_of(lr, true));
        if (it == buckets.end()) continue;
        for (std::size_t ri : it->second) {
          Row row = concat(lr, r.rows[ri]);
          if (residual_ok(row)) out.rows.push_back(std::move(row));
        }
      }
    }
    work += static_cast<std::int64_t>(out.rows.size());
    return out;
  }

  EvalNode eval_aggregate(const PlanPtr& node) {
    EvalNode in = eval(node->children[0]);

    std::vector<std::size_t> key_idx;
    for (const auto& [t, c] : node->group_keys) {
      key_idx.push_back(resolve_index(in.schema, t, c));
    }

    struct Group {
      Row key_values;
      std::vector<std::size_t> row_ids;
    };
    std::vector<Group> groups;
    std::map<std::vector<std::string>, std::size_t> group_index;
    for (std::size_t i = 0; i < in.rows.size(); ++i) {
      std::vector<std::string> gk;
      gk.reserve(key_idx.size());
      for (std::size_t k : key_idx) gk.push_back(value_to_text(in.rows[i][k]));
      auto it = group_index.find(gk);
      if (it == group_index.end()) {
        Group g;
        for (std::size_t k : key_idx) g.key_values.push_back(in.rows[i][k]);
        group_index.emplace(std::move(gk), groups.size());
        g.row_ids.push_back(i);
        groups.push_back(std::move(g));
      } else {
        groups[it->second].row_ids.push_back(i);
      }
    }
    // A global aggregate (no keys) over empty input still yields one row.
    if (key_idx.empty() && groups.empty()) groups.push_back({});

    EvalNode out;
    for (const AggItem& it : node->agg_items) {
      if (it.is_call) {
        ColumnType t = ColumnType::Int;
        if (!it.call.star) {
          const std::size_t idx =
              resolve_index(in.schema, it.call.table, it.call.column);
          t = in.schema[idx].type;
        }
        if (it.call.fn == AggFn::Count) t = ColumnType::Int;
        if (it.call.fn == AggFn::Avg) t = ColumnType::Double;
        out.schema.push_back({"", it.call.output_name(), t});
      } else {
        const std::size_t idx = resolve_index(in.schema, it.table, it.column);
        out.schema.push_back({"", in.schema[idx].name, in.schema[idx].type});
      }
    }

    for (const Group& g : groups) {
      Row row;
      for (const AggItem& it : node->agg_items) {
        if (!it.is_call) {
          const std::size_t idx = resolve_index(in.schema, it.table, it.column);
          // Group key value: identical across the group's rows.
          row.push_back(in.rows[g.row_ids.front()][idx]);
          continue;
        }
        const AggCall& call = it.call;
        if (call.fn == AggFn::Count) {
          row.push_back(static_cast<std::int64_t>(g.row_ids.size()));
          continue;
        }
        const std::size_t idx =
            resolve_index(in.schema, call.table, call.column);
        const ColumnType t = in.schema[idx].type;
        if (g.row_ids.empty()) {
          // Empty global group: typed zero sentinel.
          if (call.fn == AggFn::Avg) row.push_back(0.0);
          else if (t == ColumnType::Double) row.push_back(0.0);
          else if (t == ColumnType::String) row.push_back(std::string());
          else row.push_back(std::int64_t{0});
          continue;
        }
        if (call.fn == AggFn::Sum || call.fn == AggFn::Avg) {
          if (t == ColumnType::Double || call.fn == AggFn::Avg) {
            double acc = 0.0;
            for (std::size_t ri : g.row_ids) {
              acc += value_as_double(in.rows[ri][idx]);
            }
            if (call.fn == AggFn::Avg) {
              row.push_back(acc / static_cast<double>(g.row_ids.size()));
            } else {
              row.push_back(acc);
            }
          } else {
            std::int64_t acc = 0;
            for (std::size_t ri : g.row_ids) {
              acc += std::get<std::int64_t>(in.rows[ri][idx]);
            }
            row.push_back(acc);
          }
        } else {  // Min / Max
          Value best = in.rows[g.row_ids.front()][idx];
          for (std::size_t ri : g.row_ids) {
            const Value& v = in.rows[ri][idx];
            const int c = value_compare(v, best);
            if ((call.fn == AggFn::Min && c < 0) ||
                (call.fn == AggFn::Max && c > 0)) {
              best = v;
            }
          }
          row.push_back(best);
        }
      }
      out.rows.push_back(std::move(row));
    }
    work += static_cast<std::int64_t>(out.rows.size());
    return out;
  }
};

bool rows_bag_equal(std::vector<Row> a, std::vector<Row> b) {
  if (a.size() != b.size()) return false;
  auto lt = [](const Row& x, const Row& y) { return row_compare(x, y) < 0; };
  std::sort(a.begin(), a.end(), lt);
  std::sort(b.begin(), b.end(), lt);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (row_compare(a[i], b[i]) != 0) return false;
  }
  return true;
}

bool rows_sequence_equal(const std::vector<Row>& a, const std::vector<Row>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (row_compare(a[i], b[i]) != 0) return false;
  }
  return true;
}

bool same_sort_roots(const QueryTree& a, const QueryTree& b) {
  if (!a.root || !b.root) return false;
  if (a.root->kind != NodeKind::Sort || b.root->kind != NodeKind::Sort) {
    return false;
  }
  const auto& ka = a.root->sort_keys;
  const auto& kb = b.root->sort_keys;
  if (ka.size() != kb.size()) return false;
  for (std::size_t i = 0; i < ka.size(); ++i) {
    if (ka[i].column != kb[i].column || ka[i].asc != kb[i].asc) return false;
  }
  return true;
}

}  // namespace

ExecResult execute(const QueryTree& tree, const ToyDatabase& db) {
  Executor ex{db};
  EvalNode r = ex.eval(tree.root);
  return ExecResult{std::move(r.schema), std::move(r.rows), ex.work};
}

EquivalenceVerdict check_equivalence(const QueryTree& a, const QueryTree& b,
                                     const CatalogStats& catalog, int trials,
                                     std::uint64_t seed) {
  const bool order_checked = same_sort_roots(a, b);
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);
    ToyDatabase db = generate_toy_database(catalog, trial_seed);
    try {
      ExecResult ra = execute(a, db);
      ExecResult rb = execute(b, db);
      const bool ok = order_checked ? rows_sequence_equal(ra.rows, rb.rows)
                                    : rows_bag_equal(ra.rows, rb.rows);
      if (!ok) {
        EquivalenceVerdict v;
        v.equivalent = false;
        v.failed_trial = t;
        v.counterexample_seed = trial_seed;
        v.detail = "result mismatch (" + std::to_string(ra.rows.size()) +
                   " vs " + std::to_string(rb.rows.size()) + " rows)";
        return v;
      }
    } catch (const Error& e) {
      EquivalenceVerdict v;
      v.equivalent = false;
      v.failed_trial = t;
      v.counterexample_seed = trial_seed;
      v.detail = std::string("execution error: ") + e.what();
      return v;
    }
  }
  return EquivalenceVerdict{};
}

}  // namespace rewriter
