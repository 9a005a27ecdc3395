#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rewriter/plan.hpp"
#include "rewriter/rules.hpp"

namespace rewriter {

// One in-context example: a query plus the rule names that rewrote it.
struct Demonstration {
  std::string query_sql;
  RuleSequence rules;
};

// Prompt layout (exact, '\n' separators, no trailing newline):
//   <task instruction line>
//   Rules:
//   - NAME: description           (one per registry rule)
//   [Demonstration:
//    Input query: <sql>
//    Rules applied: <names>]      (per demonstration)
//   Input query: <sql>
//   Rules applied:
std::string build_prompt(const QueryTree& query,
                         const std::vector<Demonstration>& demos);
std::string build_prompt(const std::string& query_sql,
                         const std::vector<Demonstration>& demos);

struct RuleResponse {
  std::string raw_text;
  RuleSequence rules;                     // always a subset of the registry
  std::vector<std::string> rejected_tokens;
};

// Scans raw model output for registry rule names (case-insensitive, word
// boundaries), keeps first occurrences, and degrades to [EMPTY] when
// nothing valid is found. Uppercase-identifier-shaped tokens that are not
// registry names are recorded as rejected.
RuleResponse parse_response(const std::string& raw);

struct ChatParams {
  std::string model_id{"gpt-3.5-turbo"};
  double temperature{0.0};
  int max_tokens{256};
  double timeout_seconds{30.0};
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const std::string& prompt,
                               const ChatParams& params) = 0;
  virtual std::string name() const = 0;
};

// Deterministic offline backend with two modes.
//
// Table mode maps exact input-query SQL (the prompt's final "Input
// query:" line) to a canned response.
//
// Heuristic mode analyses the input query's tree shape: it flags
// FILTER_INTO_JOIN when a filter with a cross-table equality sits on a
// cartesian join, SORT_UNION_TRANSPOSE when a sort sits on a union, and
// AGGREGATE_PROJECT_MERGE when an aggregate sits on a projection.
// Zero-shot it answers with every flagged rule (or EMPTY). With
// demonstrations it answers with the flagged rules the demonstration
// also used; when the demonstration shares none of them it imitates the
// demonstration's rule list verbatim.
class MockBackend : public ChatBackend {
 public:
  enum class Mode { Table, Heuristic };

  explicit MockBackend(Mode mode) : mode_(mode) {}

  void add_table_entry(const std::string& query_sql, const std::string& response);

  std::string complete(const std::string& prompt,
                       const ChatParams& params) override;
  std::string name() const override {
    return mode_ == Mode::Table ? "mock-table" : "mock-heuristic";
  }

 private:
  Mode mode_;
  std::map<std::string, std::string> table_;
};

// Chat-completions HTTP backend. Body:
//   {"model": ..., "messages": [{"role": "user", "content": prompt}],
//    "temperature": ..., "max_tokens": ...}
// Endpoint and key come from RULEREWRITER_API_URL / RULEREWRITER_API_KEY
// unless set explicitly. Retries transport and 5xx failures with
// exponential backoff (1s base, factor 2), at most 3 attempts.
class HttpBackend : public ChatBackend {
 public:
  HttpBackend();
  HttpBackend(std::string url, std::string api_key);

  std::string complete(const std::string& prompt,
                       const ChatParams& params) override;
  std::string name() const override { return "http"; }

  // Injectable sleep for tests; receives milliseconds.
  void set_sleeper(std::function<void(int)> sleeper) {
    sleeper_ = std::move(sleeper);
  }

 private:
  std::string url_;
  std::string api_key_;
  std::function<void(int)> sleeper_;
};

struct Suggestion {
  RuleResponse response;
  std::string prompt;
  double latency_ms{0.0};
};

// build_prompt -> complete -> parse_response.
Suggestion suggest_rules(const QueryTree& query,
                         const std::vector<Demonstration>& demos,
                         ChatBackend& backend,
                         const ChatParams& params = {});

}  // namespace rewriter
