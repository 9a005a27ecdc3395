#include "rewriter/expr.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "rewriter/errors.hpp"

namespace rewriter {

std::string column_type_name(ColumnType t) {
  switch (t) {
    case ColumnType::Int: return "int";
    case ColumnType::Double: return "double";
    case ColumnType::String: return "string";
  }
  return "int";
}

ColumnType column_type_from_name(const std::string& s) {
  if (s == "int") return ColumnType::Int;
  if (s == "double") return ColumnType::Double;
  if (s == "string") return ColumnType::String;
  throw ConfigError("unknown column type: " + s);
}

bool value_is_numeric(const Value& v) {
  return !std::holds_alternative<std::string>(v);
}

double value_as_double(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) {
    return static_cast<double>(std::get<std::int64_t>(v));
  }
  return std::get<double>(v);
}

int value_compare(const Value& a, const Value& b) {
  const bool na = value_is_numeric(a);
  const bool nb = value_is_numeric(b);
  if (na && nb) {
    const double da = value_as_double(a);
    const double db = value_as_double(b);
    if (da < db) return -1;
    if (da > db) return 1;
    // Int sorts before Double on exact ties so the order is total.
    const int ta = std::holds_alternative<double>(a) ? 1 : 0;
    const int tb = std::holds_alternative<double>(b) ? 1 : 0;
    return ta - tb;
  }
  if (na != nb) return na ? -1 : 1;
  const auto& sa = std::get<std::string>(a);
  const auto& sb = std::get<std::string>(b);
  if (sa < sb) return -1;
  if (sa > sb) return 1;
  return 0;
}

bool value_equal(const Value& a, const Value& b) {
  return value_compare(a, b) == 0;
}

std::string value_to_text(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) {
    return std::to_string(std::get<std::int64_t>(v));
  }
  if (std::holds_alternative<double>(v)) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), std::get<double>(v));
    std::string s(buf, res.ptr);
    // Keep a decimal point so the literal re-parses as a double.
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
      s += ".0";
    }
    return s;
  }
  std::string out = "'";
  for (char c : std::get<std::string>(v)) {
    if (c == '\'') out += "''";
    else out += c;
  }
  out += "'";
  return out;
}

int row_compare(const Row& a, const Row& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int c = value_compare(a[i], b[i]);
    if (c != 0) return c;
  }
  if (a.size() < b.size()) return -1;
  if (a.size() > b.size()) return 1;
  return 0;
}

std::string cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "<>";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "=";
}

std::string arith_op_text(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
  }
  return "+";
}

std::string agg_fn_name(AggFn fn) {
  switch (fn) {
    case AggFn::Count: return "COUNT";
    case AggFn::Sum: return "SUM";
    case AggFn::Min: return "MIN";
    case AggFn::Max: return "MAX";
    case AggFn::Avg: return "AVG";
  }
  return "COUNT";
}

ExprPtr make_column(std::string table, std::string column) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Column;
  e->table = std::move(table);
  e->column = std::move(column);
  return e;
}

ExprPtr make_literal(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Literal;
  e->literal = std::move(v);
  return e;
}

ExprPtr make_compare(CmpOp op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Compare;
  e->cmp = op;
  e->children = {std::move(l), std::move(r)};
  return e;
}

ExprPtr make_arith(ArithOp op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Arith;
  e->arith = op;
  e->children = {std::move(l), std::move(r)};
  return e;
}

static ExprPtr make_nary(ExprKind kind, std::vector<ExprPtr> children) {
  std::vector<ExprPtr> flat;
  for (auto& c : children) {
    if (c->kind == kind) {
      flat.insert(flat.end(), c->children.begin(), c->children.end());
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.size() == 1) return flat[0];
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->children = std::move(flat);
  return e;
}

ExprPtr make_and(std::vector<ExprPtr> children) {
  return make_nary(ExprKind::And, std::move(children));
}

ExprPtr make_or(std::vector<ExprPtr> children) {
  return make_nary(ExprKind::Or, std::move(children));
}

ExprPtr make_not(ExprPtr child) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Not;
  e->children = {std::move(child)};
  return e;
}

ExprPtr make_agg_star(AggFn fn) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::AggCall;
  e->agg = fn;
  e->star = true;
  return e;
}

ExprPtr make_agg_col(AggFn fn, std::string table, std::string column) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::AggCall;
  e->agg = fn;
  e->star = false;
  e->table = std::move(table);
  e->column = std::move(column);
  return e;
}

namespace {

bool is_atom(const Expr& e) {
  return e.kind == ExprKind::Column || e.kind == ExprKind::Literal ||
         e.kind == ExprKind::AggCall;
}

std::string operand_text(const ExprPtr& e) {
  std::string t = expr_to_text(e);
  if (is_atom(*e)) return t;
  return "(" + t + ")";
}

}  // namespace

std::string expr_to_text(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Column:
      return e->table.empty() ? e->column : e->table + "." + e->column;
    case ExprKind::Literal:
      return value_to_text(e->literal);
    case ExprKind::Compare:
      return operand_text(e->children[0]) + " " + cmp_op_text(e->cmp) + " " +
             operand_text(e->children[1]);
    case ExprKind::Arith:
      return operand_text(e->children[0]) + " " + arith_op_text(e->arith) +
             " " + operand_text(e->children[1]);
    case ExprKind::And:
    case ExprKind::Or: {
      const std::string sep =
          e->kind == ExprKind::And ? " AND " : " OR ";
      std::string out;
      for (std::size_t i = 0; i < e->children.size(); ++i) {
        if (i) out += sep;
        out += operand_text(e->children[i]);
      }
      return out;
    }
    case ExprKind::Not:
      return "NOT " + operand_text(e->children[0]);
    case ExprKind::AggCall: {
      if (e->star) return agg_fn_name(e->agg) + "(*)";
      std::string arg =
          e->table.empty() ? e->column : e->table + "." + e->column;
      return agg_fn_name(e->agg) + "(" + arg + ")";
    }
  }
  return "";
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Column:
      return a->table == b->table && a->column == b->column;
    case ExprKind::Literal:
      if (a->literal.index() != b->literal.index()) return false;
      return value_equal(a->literal, b->literal);
    case ExprKind::Compare:
      if (a->cmp != b->cmp) return false;
      break;
    case ExprKind::Arith:
      if (a->arith != b->arith) return false;
      break;
    case ExprKind::AggCall:
      return a->agg == b->agg && a->star == b->star && a->table == b->table &&
             a->column == b->column;
    default:
      break;
  }
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!expr_equal(a->children[i], b->children[i])) return false;
  }
  return true;
}

std::vector<ExprPtr> split_conjuncts(const ExprPtr& pred) {
  if (!pred) return {};
  if (pred->kind == ExprKind::And) return pred->children;
  return {pred};
}

bool expr_contains_agg(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::AggCall) return true;
  for (const auto& c : e->children) {
    if (expr_contains_agg(c)) return true;
  }
  return false;
}

void collect_columns(const ExprPtr& e, std::vector<const Expr*>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Column) out.push_back(e.get());
  for (const auto& c : e->children) collect_columns(c, out);
}

ExprPtr map_columns(const ExprPtr& e,
                    const std::function<ExprPtr(const Expr&)>& fn) {
  if (!e) return e;
  if (e->kind == ExprKind::Column) return fn(*e);
  if (e->children.empty()) return e;
  bool changed = false;
  std::vector<ExprPtr> kids;
  kids.reserve(e->children.size());
  for (const auto& c : e->children) {
    ExprPtr nc = map_columns(c, fn);
    changed |= (nc != c);
    kids.push_back(std::move(nc));
  }
  if (!changed) return e;
  auto out = std::make_shared<Expr>(*e);
  out->children = std::move(kids);
  return out;
}

}  // namespace rewriter
