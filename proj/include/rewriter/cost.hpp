#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rewriter/catalog.hpp"
#include "rewriter/plan.hpp"
#include "rewriter/toydb.hpp"

namespace rewriter {

struct NodeCost {
  std::string kind;
  double estimated_rows{0.0};
  double cumulative_cost{0.0};
};

struct CostReport {
  // Preorder, aligned with preorder_nodes of the estimated tree.
  std::vector<NodeCost> per_node;
  double total_cost{0.0};

  std::string to_json() const;
};

// Bottom-up cardinality and cost estimation. Selectivities follow the
// classical conventions: 1/ndv for equality, 1/3 for ranges, independence
// for AND, inclusion-exclusion for OR. Every row estimate is floored at 1.
CostReport estimate(const QueryTree& tree, const CatalogStats& stats);

// Single capability: a positive scalar cost for a tree.
class CostBackend {
 public:
  virtual ~CostBackend() = default;
  virtual double cost(const QueryTree& tree) const = 0;
  virtual std::string name() const = 0;
};

class EstimatorBackend : public CostBackend {
 public:
  explicit EstimatorBackend(CatalogStats stats) : stats_(std::move(stats)) {}
  double cost(const QueryTree& tree) const override;
  std::string name() const override { return "estimator"; }

 private:
  CatalogStats stats_;
};

// Ground-truth style backend: mean work units of executing the tree over
// k seeded toy databases.
class InterpreterBackend : public CostBackend {
 public:
  InterpreterBackend(CatalogStats stats, std::uint64_t seed, int databases = 3);
  double cost(const QueryTree& tree) const override;
  std::string name() const override { return "interpreter"; }
  const std::vector<std::uint64_t>& seeds() const { return seeds_; }

 private:
  CatalogStats stats_;
  std::vector<std::uint64_t> seeds_;
  std::vector<ToyDatabase> databases_;
};

// alpha = cost(original) / cost(rewritten); > 1 iff the rewrite improves.
double improved_margin(const QueryTree& original, const QueryTree& rewritten,
                       const CostBackend& backend);

// min(cost, cap); used by evaluation metrics only.
double capped_cost(const QueryTree& tree, const CostBackend& backend, double cap);

}  // namespace rewriter
