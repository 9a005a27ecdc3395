#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rewriter/cost.hpp"
#include "rewriter/llm.hpp"
#include "rewriter/plan.hpp"

namespace rewriter {

enum class SelectorTag { ZeroShot, Random, Tree, SentTrans };

std::string selector_tag_name(SelectorTag t);

// Benefit record for one rewrite attempt: a query, the demonstration it
// was prompted with (none for zero-shot), the adopted rules and the cost
// ratio original/rewritten.
struct RewriteTuple {
  std::string query_id;
  std::string query_sql;
  std::optional<Demonstration> demo;
  RuleSequence rules;
  double alpha{1.0};
  SelectorTag selector{SelectorTag::ZeroShot};
};

struct TrainingTriplet {
  std::string anchor_sql;
  std::string positive_sql;
  std::string negative_sql;
};

struct DemoPool {
  std::vector<Demonstration> entries;  // ids are positions
  std::string content_hash;

  static constexpr int kFormatVersion = 1;
};

struct WorkloadQuery {
  std::string id;
  std::string sql;
};

struct PrepareStats {
  std::vector<std::pair<std::string, std::string>> failures;  // (id, error)
  std::size_t triplets_skipped{0};
};

// Zero-shot pass over the training queries: one tuple per query (failed
// queries are recorded, not fatal).
std::vector<RewriteTuple> stage1_candidates(
    const std::vector<WorkloadQuery>& training_queries, ChatBackend& backend,
    const CostBackend& cost, PrepareStats* stats = nullptr);

// Tuples with alpha > 1, as demonstrations.
std::vector<Demonstration> improving_candidates(
    const std::vector<RewriteTuple>& tuples);

// Heuristic selectors over a candidate list. Ties break toward the lowest
// candidate index; random choice is uniform under the seed.
std::size_t random_select(const QueryTree& input,
                          const std::vector<Demonstration>& candidates,
                          std::uint64_t seed);
std::size_t tree_select(const QueryTree& input,
                        const std::vector<Demonstration>& candidates);
std::size_t text_select(const QueryTree& input,
                        const std::vector<Demonstration>& candidates);

// One-shot pass: for each query and each of {random, tree, senttrans},
// select a demonstration (candidates equal to the query itself are
// excluded), prompt, apply, score. Three tuples per query.
std::vector<RewriteTuple> stage2_tuples(
    const std::vector<WorkloadQuery>& training_queries,
    const std::vector<Demonstration>& candidates, ChatBackend& backend,
    const CostBackend& cost, std::uint64_t seed, PrepareStats* stats = nullptr);

// Per query: positive = demo of the max-alpha tuple with alpha > 1,
// negative = demo of the min-alpha tuple with alpha < 1; emitted only when
// both exist. Queries are processed in first-appearance order.
std::vector<TrainingTriplet> build_triplets(
    const std::vector<RewriteTuple>& tuples, PrepareStats* stats = nullptr);

// Per query group: the argmax-alpha tuple (ties toward the earliest)
// enters the pool iff its alpha > 1.
DemoPool build_pool(const std::vector<RewriteTuple>& tuples);

std::string pool_content_hash(const std::vector<Demonstration>& entries);

// JSON Lines serialization.
std::string tuple_to_json(const RewriteTuple& t);
RewriteTuple tuple_from_json(const std::string& line);
std::string triplet_to_json(const TrainingTriplet& t);
TrainingTriplet triplet_from_json(const std::string& line);
void save_pool_file(const DemoPool& pool, const std::string& path);
DemoPool load_pool_file(const std::string& path);

}  // namespace rewriter
