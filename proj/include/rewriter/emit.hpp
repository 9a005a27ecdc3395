#pragma once

#include <string>

#include "rewriter/plan.hpp"

namespace rewriter {

// Renders a query tree back to SQL text deterministically: uppercase
// keywords, lower-case identifiers, single spaces. parse(emit(t)) is
// structurally identical to t for canonical (parser-produced) trees;
// rewritten trees re-render into the canonical equivalent where the
// grammar cannot express their exact shape (e.g. a merged-away input
// projection). Throws EmitError for shapes with no SQL rendering in the
// subset (e.g. an Aggregate directly above a Union).
std::string emit(const QueryTree& tree);

}  // namespace rewriter
