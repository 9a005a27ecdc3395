#include "rewriter/tree_edit.hpp"

#include <algorithm>

namespace rewriter {

LabeledTree labeled_tree_of(const QueryTree& t) {
  LabeledTree out;
  struct Builder {
    LabeledTree& lt;
    int build(const PlanPtr& n) {
      const int id = static_cast<int>(lt.nodes.size());
      lt.nodes.push_back({node_kind_name(n->kind), {}});
      for (const auto& c : n->children) {
        const int cid = build(c);
        lt.nodes[id].children.push_back(cid);
      }
      return id;
    }
  } b{out};
  if (t.root) b.build(t.root);
  return out;
}

namespace {

// Postorder numbering with leftmost-leaf-descendant indices, the standard
// Zhang–Shasha preprocessing.
struct ZsTree {
  std::vector<std::string> labels;  // postorder
  std::vector<int> lld;             // leftmost leaf descendant, postorder
  std::vector<int> keyroots;

  explicit ZsTree(const LabeledTree& t) {
    if (t.nodes.empty()) return;
    postorder(t, 0);
    std::vector<bool> is_keyroot(labels.size(), false);
    std::vector<bool> seen_lld(labels.size(), false);
    for (int i = static_cast<int>(labels.size()) - 1; i >= 0; --i) {
      if (!seen_lld[lld[i]]) {
        is_keyroot[i] = true;
        seen_lld[lld[i]] = true;
      }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (is_keyroot[i]) keyroots.push_back(static_cast<int>(i));
    }
  }

 private:
  int postorder(const LabeledTree& t, int node) {
    int first = -1;
    for (int c : t.nodes[node].children) {
      const int cf = postorder(t, c);
      if (first == -1) first = cf;
    }
    const int id = static_cast<int>(labels.size());
    labels.push_back(t.nodes[node].label);
    lld.push_back(first == -1 ? id : first);
    return first == -1 ? id : first;
  }
};

}  // namespace

int tree_edit_distance(const LabeledTree& a, const LabeledTree& b) {
  ZsTree ta(a), tb(b);
  const int n = static_cast<int>(ta.labels.size());
  const int m = static_cast<int>(tb.labels.size());
  if (n == 0) return m;
  if (m == 0) return n;

  std::vector<std::vector<int>> td(n, std::vector<int>(m, 0));
  std::vector<std::vector<int>> fd(n + 2, std::vector<int>(m + 2, 0));

  for (int i : ta.keyroots) {
    for (int j : tb.keyroots) {
      const int li = ta.lld[i];
      const int lj = tb.lld[j];
      fd[li][lj] = 0;
      for (int di = li; di <= i; ++di) {
        fd[di + 1][lj] = fd[di][lj] + 1;
      }
      for (int dj = lj; dj <= j; ++dj) {
        fd[li][dj + 1] = fd[li][dj] + 1;
      }
      for (int di = li; di <= i; ++di) {
        for (int dj = lj; dj <= j; ++dj) {
          if (ta.lld[di] == li && tb.lld[dj] == lj) {
            const int rename = ta.labels[di] == tb.labels[dj] ? 0 : 1;
            fd[di + 1][dj + 1] = std::min({fd[di][dj + 1] + 1,
                                           fd[di + 1][dj] + 1,
                                           fd[di][dj] + rename});
            td[di][dj] = fd[di + 1][dj + 1];
          } else {
            fd[di + 1][dj + 1] =
                std::min({fd[di][dj + 1] + 1, fd[di + 1][dj] + 1,
                          fd[ta.lld[di]][tb.lld[dj]] + td[di][dj]});
          }
        }
      }
    }
  }
  return td[n - 1][m - 1];
}

int tree_edit_distance(const QueryTree& a, const QueryTree& b) {
  return tree_edit_distance(labeled_tree_of(a), labeled_tree_of(b));
}

}  // namespace rewriter
