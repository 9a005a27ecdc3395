#include "rewriter/text_embed.hpp"

#include <cctype>
#include <cmath>

#include "rewriter/kernels.hpp"

namespace rewriter {

std::uint64_t fnv1a_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<double> embed_text(const std::string& text, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    v[fnv1a_hash(token) % dim] += 1.0;
    token.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      token.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  const double norm = std::sqrt(kernels::dot(v.data(), v.data(), dim));
  if (norm > 0.0) kernels::scale(1.0 / norm, v.data(), dim);
  return v;
}

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b) {
  const double na = std::sqrt(kernels::dot(a.data(), a.data(), a.size()));
  const double nb = std::sqrt(kernels::dot(b.data(), b.data(), b.size()));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return kernels::dot(a.data(), b.data(), a.size()) / (na * nb);
}

}  // namespace rewriter
