#pragma once

#include <string>
#include <vector>

#include "rewriter/plan.hpp"

namespace rewriter {

// Ordered labeled tree for edit-distance computations: labels are the
// operator kinds only.
struct LabeledTree {
  struct Node {
    std::string label;
    std::vector<int> children;
  };
  std::vector<Node> nodes;  // index 0 is the root
};

LabeledTree labeled_tree_of(const QueryTree& t);

// Zhang–Shasha ordered tree edit distance with unit insert/delete/rename
// costs.
int tree_edit_distance(const LabeledTree& a, const LabeledTree& b);
int tree_edit_distance(const QueryTree& a, const QueryTree& b);

}  // namespace rewriter
