#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rewriter {

// Deterministic hashing text embedder: lower-case, split on
// non-alphanumerics, count tokens into bucket fnv1a(token) % dim,
// L2-normalize. Empty text yields the zero vector.
std::vector<double> embed_text(const std::string& text, std::size_t dim);

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b);

std::uint64_t fnv1a_hash(const std::string& s);

}  // namespace rewriter
