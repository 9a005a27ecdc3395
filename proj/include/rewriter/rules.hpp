#pragma once

#include <string>
#include <vector>

#include "rewriter/plan.hpp"

namespace rewriter {

struct RewriteRule {
  std::string name;         // uppercase identifier
  std::string description;  // one line, prompt-ready
};

// The fixed rule registry, in a stable order. EMPTY is the identity rule.
const std::vector<RewriteRule>& rule_registry();

bool is_registry_rule(const std::string& name);

// "- NAME: description" lines, one per rule, in registry order.
std::string render_registry();

using RuleSequence = std::vector<std::string>;

struct ApplyResult {
  QueryTree tree;
  bool matched{false};
};

// Applies one rule at the first matching site (top-down, children left to
// right), at most once. A non-matching rule returns the input unchanged
// with matched=false. EMPTY always matches and never changes the tree.
// Throws UnknownRule.
ApplyResult apply_rule(const QueryTree& tree, const std::string& rule_name);

struct SequenceResult {
  QueryTree tree;
  std::vector<std::pair<std::string, bool>> applied;  // (rule, matched)
};

// Left-to-right application; the empty sequence is the identity.
SequenceResult apply_sequence(const QueryTree& tree, const RuleSequence& rules);

}  // namespace rewriter
