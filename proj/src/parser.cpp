#include "rewriter/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <set>

#include "rewriter/errors.hpp"

namespace rewriter {

namespace {

enum class Tok {
  End, Ident, Int, Decimal, String,
  Comma, Dot, LParen, RParen, Star,
  Eq, Ne, Lt, Le, Gt, Ge,
  Plus, Minus, Slash,
  Keyword,
};

struct Token {
  Tok type{Tok::End};
  std::string text;   // idents lower-cased, keywords upper-cased
  std::size_t index{0};
};

const std::set<std::string> kKeywords = {
    "SELECT", "FROM", "WHERE", "GROUP", "BY", "ORDER", "LIMIT",
    "UNION", "ALL", "INNER", "JOIN", "ON", "AND", "OR", "NOT",
    "ASC", "DESC", "COUNT", "SUM", "MIN", "MAX", "AVG",
    // Recognized so they can be rejected with a clear error.
    "DISTINCT", "HAVING", "LEFT", "RIGHT", "FULL", "OUTER", "AS",
};

std::vector<Token> tokenize(const std::string& sql) {
  std::vector<Token> out;
  std::size_t pos = 0;
  const std::size_t n = sql.size();
  while (pos < n) {
    const char c = sql[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    Token t;
    t.index = out.size();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos < n && (std::isalnum(static_cast<unsigned char>(sql[pos])) ||
                         sql[pos] == '_')) {
        word.push_back(sql[pos++]);
      }
      std::string upper = word;
      for (auto& ch : upper) ch = std::toupper(static_cast<unsigned char>(ch));
      if (kKeywords.count(upper)) {
        t.type = Tok::Keyword;
        t.text = upper;
      } else {
        t.type = Tok::Ident;
        for (auto& ch : word) ch = std::tolower(static_cast<unsigned char>(ch));
        t.text = word;
      }
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      bool decimal = false;
      while (pos < n && (std::isdigit(static_cast<unsigned char>(sql[pos])) ||
                         sql[pos] == '.')) {
        if (sql[pos] == '.') {
          if (decimal) break;
          // A dot not followed by a digit belongs to the next token.
          if (pos + 1 >= n || !std::isdigit(static_cast<unsigned char>(sql[pos + 1]))) break;
          decimal = true;
        }
        num.push_back(sql[pos++]);
      }
      t.type = decimal ? Tok::Decimal : Tok::Int;
      t.text = num;
      out.push_back(t);
      continue;
    }
    if (c == '\'') {
      ++pos;
      std::string s;
      bool closed = false;
      while (pos < n) {
        if (sql[pos] == '\'') {
          if (pos + 1 < n && sql[pos + 1] == '\'') {
            s.push_back('\'');
            pos += 2;
            continue;
          }
          ++pos;
          closed = true;
          break;
        }
        s.push_back(sql[pos++]);
      }
      if (!closed) throw SyntaxError(out.size(), "closing quote", s);
      t.type = Tok::String;
      t.text = s;
      out.push_back(t);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && pos + 1 < n && sql[pos + 1] == b;
    };
    if (two('<', '=')) { t.type = Tok::Le; pos += 2; }
    else if (two('>', '=')) { t.type = Tok::Ge; pos += 2; }
    else if (two('<', '>')) { t.type = Tok::Ne; pos += 2; }
    else if (two('!', '=')) { t.type = Tok::Ne; pos += 2; }
    else {
      switch (c) {
        case ',': t.type = Tok::Comma; break;
        case '.': t.type = Tok::Dot; break;
        case '(': t.type = Tok::LParen; break;
        case ')': t.type = Tok::RParen; break;
        case '*': t.type = Tok::Star; break;
        case '=': t.type = Tok::Eq; break;
        case '<': t.type = Tok::Lt; break;
        case '>': t.type = Tok::Gt; break;
        case '+': t.type = Tok::Plus; break;
        case '-': t.type = Tok::Minus; break;
        case '/': t.type = Tok::Slash; break;
        default:
          throw SyntaxError(out.size(), "a token", std::string(1, c));
      }
      ++pos;
    }
    if (t.text.empty()) t.text = std::string(1, c);
    out.push_back(t);
  }
  Token end;
  end.type = Tok::End;
  end.text = "<end>";
  end.index = out.size();
  out.push_back(end);
  return out;
}

struct SelectItem {
  ExprPtr expr;
};

class Parser {
 public:
  explicit Parser(const std::string& sql) : toks_(tokenize(sql)) {}

  PlanPtr parse_statement_top() {
    PlanPtr p = parse_statement();
    expect_end();
    return p;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_{0};

  const Token& cur() const { return toks_[pos_]; }

  bool is_kw(const char* kw) const {
    return cur().type == Tok::Keyword && cur().text == kw;
  }

  bool accept_kw(const char* kw) {
    if (is_kw(kw)) { ++pos_; return true; }
    return false;
  }

  void expect_kw(const char* kw) {
    if (!accept_kw(kw)) throw SyntaxError(cur().index, kw, cur().text);
  }

  bool accept(Tok t) {
    if (cur().type == t) { ++pos_; return true; }
    return false;
  }

  void expect(Tok t, const char* what) {
    if (!accept(t)) throw SyntaxError(cur().index, what, cur().text);
  }

  void expect_end() {
    if (cur().type != Tok::End) {
      throw SyntaxError(cur().index, "end of input", cur().text);
    }
  }

  void reject_unsupported_kw() {
    if (cur().type != Tok::Keyword) return;
    const std::string& k = cur().text;
    if (k == "DISTINCT") throw UnsupportedFeature("DISTINCT");
    if (k == "HAVING") throw UnsupportedFeature("HAVING");
    if (k == "LEFT" || k == "RIGHT" || k == "FULL" || k == "OUTER") {
      throw UnsupportedFeature("outer join");
    }
    if (k == "AS") throw UnsupportedFeature("column alias");
  }

  // statement := union_expr [ORDER BY keys] [LIMIT n]
  PlanPtr parse_statement() {
    PlanPtr body = parse_union_expr();
    if (accept_kw("ORDER")) {
      expect_kw("BY");
      std::vector<SortKey> keys;
      do {
        reject_unsupported_kw();
        if (cur().type != Tok::Ident) {
          throw SyntaxError(cur().index, "sort column", cur().text);
        }
        SortKey k;
        k.column = cur().text;
        ++pos_;
        if (accept(Tok::Dot)) {
          throw UnsupportedFeature("qualified ORDER BY key");
        }
        if (accept_kw("DESC")) k.asc = false;
        else accept_kw("ASC");
        keys.push_back(k);
      } while (accept(Tok::Comma));
      body = make_sort(std::move(keys), body);
    }
    if (accept_kw("LIMIT")) {
      if (cur().type != Tok::Int) {
        throw SyntaxError(cur().index, "limit count", cur().text);
      }
      std::int64_t count = 0;
      std::from_chars(cur().text.data(), cur().text.data() + cur().text.size(),
                      count);
      ++pos_;
      body = make_limit(count, body);
    }
    return body;
  }

  // union_expr := select_term { UNION ALL select_term }    (left-deep)
  PlanPtr parse_union_expr() {
    PlanPtr left = parse_select_term();
    while (is_kw("UNION")) {
      ++pos_;
      expect_kw("ALL");
      PlanPtr right = parse_select_term();
      left = make_union(left, right);
    }
    return left;
  }

  // select_term := select_core | '(' statement ')'
  PlanPtr parse_select_term() {
    if (accept(Tok::LParen)) {
      PlanPtr inner = parse_statement();
      expect(Tok::RParen, ")");
      return inner;
    }
    return parse_select_core();
  }

  PlanPtr parse_select_core() {
    expect_kw("SELECT");
    reject_unsupported_kw();
    std::vector<SelectItem> items;
    if (is_kw("FROM")) {
      throw SyntaxError(cur().index, "select list", cur().text);
    }
    do {
      reject_unsupported_kw();
      items.push_back({parse_expr()});
      reject_unsupported_kw();
    } while (accept(Tok::Comma));
    expect_kw("FROM");
    PlanPtr from = parse_from_clause();
    ExprPtr where;
    if (accept_kw("WHERE")) {
      where = parse_expr();
      if (expr_contains_agg(where)) {
        throw UnsupportedFeature("aggregate call in WHERE");
      }
    }
    std::vector<std::pair<std::string, std::string>> group_keys;
    bool has_group = false;
    if (accept_kw("GROUP")) {
      expect_kw("BY");
      has_group = true;
      do {
        ExprPtr e = parse_expr();
        if (e->kind != ExprKind::Column) {
          throw UnsupportedFeature("non-column GROUP BY key");
        }
        group_keys.emplace_back(e->table, e->column);
      } while (accept(Tok::Comma));
    }
    return build_core(std::move(items), from, where, std::move(group_keys),
                      has_group);
  }

  PlanPtr build_core(std::vector<SelectItem> items, PlanPtr from, ExprPtr where,
                     std::vector<std::pair<std::string, std::string>> group_keys,
                     bool has_group) {
    PlanPtr below = from;
    if (where) below = make_filter(where, below);

    const bool has_agg = std::any_of(
        items.begin(), items.end(),
        [](const SelectItem& it) { return expr_contains_agg(it.expr); });

    if (!has_agg && !has_group) {
      std::vector<ExprPtr> proj;
      proj.reserve(items.size());
      for (auto& it : items) proj.push_back(it.expr);
      return make_project(std::move(proj), below);
    }

    // Aggregate path: each select item is either a group key column or a
    // single aggregate call; the input is narrowed through a column-only
    // projection of the referenced columns.
    std::vector<AggItem> agg_items;
    std::vector<std::pair<std::string, std::string>> input_cols;
    auto add_input = [&](const std::string& t, const std::string& c) {
      for (const auto& [et, ec] : input_cols) {
        if (et == t && ec == c) return;
      }
      input_cols.emplace_back(t, c);
    };
    for (const auto& [t, c] : group_keys) add_input(t, c);
    for (auto& it : items) {
      if (it.expr->kind == ExprKind::Column) {
        const bool is_key = std::any_of(
            group_keys.begin(), group_keys.end(), [&](const auto& k) {
              return k.second == it.expr->column &&
                     (k.first == it.expr->table || k.first.empty() ||
                      it.expr->table.empty());
            });
        if (!is_key) {
          throw SchemaMismatch("select item '" + it.expr->column +
                               "' is not a group key");
        }
        AggItem a;
        a.is_call = false;
        a.table = it.expr->table;
        a.column = it.expr->column;
        agg_items.push_back(a);
        add_input(it.expr->table, it.expr->column);
      } else if (it.expr->kind == ExprKind::AggCall) {
        AggItem a;
        a.is_call = true;
        a.call.fn = it.expr->agg;
        a.call.star = it.expr->star;
        a.call.table = it.expr->table;
        a.call.column = it.expr->column;
        for (const auto& prev : agg_items) {
          if (prev.is_call && prev.call.output_name() == a.call.output_name()) {
            throw UnsupportedFeature("duplicate aggregate call " +
                                     a.call.output_name());
          }
        }
        agg_items.push_back(a);
        if (!it.expr->star) add_input(it.expr->table, it.expr->column);
      } else {
        throw UnsupportedFeature("expression select item in aggregate query");
      }
    }
    std::vector<ExprPtr> proj;
    proj.reserve(input_cols.size());
    for (const auto& [t, c] : input_cols) proj.push_back(make_column(t, c));
    if (proj.empty()) {
      // COUNT(*)-only over no keys still needs an input projection; keep
      // the narrowest thing expressible without catalog knowledge.
      throw UnsupportedFeature("aggregate query referencing no columns");
    }
    PlanPtr project = make_project(std::move(proj), below);
    return make_aggregate(std::move(agg_items), std::move(group_keys), project);
  }

  // from_clause := table { ',' table | INNER JOIN table ON pred }  (left-deep)
  PlanPtr parse_from_clause() {
    PlanPtr left = parse_table_ref();
    for (;;) {
      if (accept(Tok::Comma)) {
        PlanPtr right = parse_table_ref();
        left = make_join(JoinType::Cartesian, nullptr, left, right);
        continue;
      }
      if (is_kw("INNER") || is_kw("JOIN")) {
        accept_kw("INNER");
        expect_kw("JOIN");
        PlanPtr right = parse_table_ref();
        expect_kw("ON");
        ExprPtr pred = parse_expr();
        left = make_join(JoinType::Inner, pred, left, right);
        continue;
      }
      reject_unsupported_kw();
      break;
    }
    return left;
  }

  PlanPtr parse_table_ref() {
    if (cur().type == Tok::LParen) throw UnsupportedFeature("subquery");
    reject_unsupported_kw();
    if (cur().type != Tok::Ident) {
      throw SyntaxError(cur().index, "table name", cur().text);
    }
    std::string table = cur().text;
    ++pos_;
    if (cur().type == Tok::Ident) throw UnsupportedFeature("table alias");
    return make_scan(std::move(table));
  }

  // expr := or_expr
  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    std::vector<ExprPtr> parts{parse_and()};
    while (accept_kw("OR")) parts.push_back(parse_and());
    return parts.size() == 1 ? parts[0] : make_or(std::move(parts));
  }

  ExprPtr parse_and() {
    std::vector<ExprPtr> parts{parse_not()};
    while (accept_kw("AND")) parts.push_back(parse_not());
    return parts.size() == 1 ? parts[0] : make_and(std::move(parts));
  }

  ExprPtr parse_not() {
    if (accept_kw("NOT")) return make_not(parse_not());
    return parse_predicate();
  }

  ExprPtr parse_predicate() {
    ExprPtr left = parse_additive();
    std::optional<CmpOp> op;
    switch (cur().type) {
      case Tok::Eq: op = CmpOp::Eq; break;
      case Tok::Ne: op = CmpOp::Ne; break;
      case Tok::Lt: op = CmpOp::Lt; break;
      case Tok::Le: op = CmpOp::Le; break;
      case Tok::Gt: op = CmpOp::Gt; break;
      case Tok::Ge: op = CmpOp::Ge; break;
      default: break;
    }
    if (!op) return left;
    ++pos_;
    ExprPtr right = parse_additive();
    return make_compare(*op, left, right);
  }

  ExprPtr parse_additive() {
    ExprPtr left = parse_multiplicative();
    for (;;) {
      if (accept(Tok::Plus)) {
        left = make_arith(ArithOp::Add, left, parse_multiplicative());
      } else if (accept(Tok::Minus)) {
        left = make_arith(ArithOp::Sub, left, parse_multiplicative());
      } else {
        return left;
      }
    }
  }

  ExprPtr parse_multiplicative() {
    ExprPtr left = parse_unary();
    for (;;) {
      if (accept(Tok::Star)) {
        left = make_arith(ArithOp::Mul, left, parse_unary());
      } else if (accept(Tok::Slash)) {
        left = make_arith(ArithOp::Div, left, parse_unary());
      } else {
        return left;
      }
    }
  }

  ExprPtr parse_unary() {
    if (accept(Tok::LParen)) {
      if (is_kw("SELECT")) throw UnsupportedFeature("subquery");
      ExprPtr e = parse_expr();
      expect(Tok::RParen, ")");
      return e;
    }
    if (accept(Tok::Minus)) {
      ExprPtr e = parse_unary();
      if (e->kind == ExprKind::Literal &&
          std::holds_alternative<std::int64_t>(e->literal)) {
        return make_literal(-std::get<std::int64_t>(e->literal));
      }
      if (e->kind == ExprKind::Literal &&
          std::holds_alternative<double>(e->literal)) {
        return make_literal(-std::get<double>(e->literal));
      }
      return make_arith(ArithOp::Sub, make_literal(std::int64_t{0}), e);
    }
    if (cur().type == Tok::Int) {
      std::int64_t v = 0;
      std::from_chars(cur().text.data(), cur().text.data() + cur().text.size(), v);
      ++pos_;
      return make_literal(v);
    }
    if (cur().type == Tok::Decimal) {
      double v = std::stod(cur().text);
      ++pos_;
      return make_literal(v);
    }
    if (cur().type == Tok::String) {
      std::string s = cur().text;
      ++pos_;
      return make_literal(std::move(s));
    }
    if (cur().type == Tok::Keyword) {
      const std::string kw = cur().text;
      auto agg_of = [&](AggFn fn) -> ExprPtr {
        ++pos_;
        expect(Tok::LParen, "(");
        if (accept(Tok::Star)) {
          if (fn != AggFn::Count) {
            throw UnsupportedFeature(agg_fn_name(fn) + "(*)");
          }
          expect(Tok::RParen, ")");
          return make_agg_star(fn);
        }
        auto [t, c] = parse_colref();
        expect(Tok::RParen, ")");
        return make_agg_col(fn, t, c);
      };
      if (kw == "COUNT") return agg_of(AggFn::Count);
      if (kw == "SUM") return agg_of(AggFn::Sum);
      if (kw == "MIN") return agg_of(AggFn::Min);
      if (kw == "MAX") return agg_of(AggFn::Max);
      if (kw == "AVG") return agg_of(AggFn::Avg);
      reject_unsupported_kw();
      throw SyntaxError(cur().index, "an expression", cur().text);
    }
    if (cur().type == Tok::Ident) {
      auto [t, c] = parse_colref();
      return make_column(t, c);
    }
    throw SyntaxError(cur().index, "an expression", cur().text);
  }

  std::pair<std::string, std::string> parse_colref() {
    if (cur().type != Tok::Ident) {
      throw SyntaxError(cur().index, "column name", cur().text);
    }
    std::string first = cur().text;
    ++pos_;
    if (accept(Tok::Dot)) {
      if (cur().type != Tok::Ident) {
        throw SyntaxError(cur().index, "column name", cur().text);
      }
      std::string second = cur().text;
      ++pos_;
      return {first, second};
    }
    return {"", first};
  }
};

}  // namespace

QueryTree parse(const std::string& sql) {
  Parser p(sql);
  return QueryTree{p.parse_statement_top()};
}

QueryTree parse(const std::string& sql, const CatalogStats& catalog) {
  QueryTree t = parse(sql);
  validate_tree(t, catalog);
  return t;
}

}  // namespace rewriter
