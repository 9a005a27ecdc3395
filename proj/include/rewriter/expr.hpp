#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rewriter/value.hpp"

namespace rewriter {

enum class ExprKind { Column, Literal, Compare, Arith, And, Or, Not, AggCall };

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp { Add, Sub, Mul, Div };
enum class AggFn { Count, Sum, Min, Max, Avg };

std::string cmp_op_text(CmpOp op);
std::string arith_op_text(ArithOp op);
std::string agg_fn_name(AggFn fn);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree. Rewrites share unchanged subtrees.
struct Expr {
  ExprKind kind{ExprKind::Literal};

  // Column: optional table qualifier, both stored lower-case as written.
  std::string table;
  std::string column;

  // Literal
  Value literal{std::int64_t{0}};

  CmpOp cmp{CmpOp::Eq};
  ArithOp arith{ArithOp::Add};

  // AggCall: fn and either star (COUNT(*)) or a single column argument
  // held in table/column.
  AggFn agg{AggFn::Count};
  bool star{false};

  // And/Or: n-ary (>= 2); Not: 1; Compare/Arith: 2.
  std::vector<ExprPtr> children;
};

ExprPtr make_column(std::string table, std::string column);
ExprPtr make_literal(Value v);
ExprPtr make_compare(CmpOp op, ExprPtr l, ExprPtr r);
ExprPtr make_arith(ArithOp op, ExprPtr l, ExprPtr r);
ExprPtr make_and(std::vector<ExprPtr> children);   // flattens nested Ands
ExprPtr make_or(std::vector<ExprPtr> children);    // flattens nested Ors
ExprPtr make_not(ExprPtr child);
ExprPtr make_agg_star(AggFn fn);
ExprPtr make_agg_col(AggFn fn, std::string table, std::string column);

// Deterministic rendering: uppercase keywords, single spaces, compound
// operands parenthesized.
std::string expr_to_text(const ExprPtr& e);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Conjuncts of a predicate: children for an And root, the expression
// itself otherwise.
std::vector<ExprPtr> split_conjuncts(const ExprPtr& pred);

bool expr_contains_agg(const ExprPtr& e);

// Collects column references in preorder.
void collect_columns(const ExprPtr& e, std::vector<const Expr*>& out);

// Rewrites every column reference through fn (returning a replacement
// expression); other nodes are rebuilt as needed.
ExprPtr map_columns(const ExprPtr& e,
                    const std::function<ExprPtr(const Expr&)>& fn);

}  // namespace rewriter
