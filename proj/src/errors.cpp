#include "rewriter/errors.hpp"

#include <sstream>

namespace rewriter {

namespace {

std::string fmt_syntax(std::size_t token_index, const std::string& expected,
                       const std::string& got) {
  std::ostringstream os;
  os << "syntax error at token " << token_index << ": expected " << expected
     << ", got '" << got << "'";
  return os.str();
}

std::string fmt_unresolved(const std::string& name,
                           const std::vector<std::string>& candidates) {
  std::ostringstream os;
  os << "unresolved column '" << name << "'; in scope:";
  if (candidates.empty()) {
    os << " (none)";
  } else {
    for (const auto& c : candidates) os << ' ' << c;
  }
  return os.str();
}

}  // namespace

SyntaxError::SyntaxError(std::size_t token_index_, const std::string& expected_,
                         const std::string& got_)
    : Error(fmt_syntax(token_index_, expected_, got_)),
      token_index(token_index_),
      expected(expected_),
      got(got_) {}

UnresolvedColumn::UnresolvedColumn(const std::string& name_,
                                   const std::vector<std::string>& candidates_)
    : Error(fmt_unresolved(name_, candidates_)),
      name(name_),
      candidates(candidates_) {}

UnsupportedFeature::UnsupportedFeature(const std::string& construct_)
    : Error("unsupported feature: " + construct_), construct(construct_) {}

UnknownRule::UnknownRule(const std::string& rule_name_)
    : Error("unknown rewrite rule: " + rule_name_), rule_name(rule_name_) {}

SchemaMismatch::SchemaMismatch(const std::string& detail)
    : Error("schema mismatch: " + detail) {}

DivisionByZero::DivisionByZero(const std::string& row_context_)
    : Error("division by zero while evaluating row " + row_context_),
      row_context(row_context_) {}

EmitError::EmitError(const std::string& detail)
    : Error("plan shape not emittable: " + detail) {}

EmptyCandidates::EmptyCandidates() : Error("no candidate demonstrations") {}

EmptyPool::EmptyPool() : Error("demonstration pool is empty") {}

EmptyDataset::EmptyDataset() : Error("training dataset is empty") {}

AlignmentError::AlignmentError(const std::string& detail)
    : Error("feature/report alignment error: " + detail) {}

NonFiniteLoss::NonFiniteLoss(std::size_t triplet_index_)
    : Error("non-finite loss at triplet " + std::to_string(triplet_index_)),
      triplet_index(triplet_index_) {}

BackendUnavailable::BackendUnavailable(const std::string& detail)
    : Error("chat backend unavailable: " + detail) {}

VersionMismatch::VersionMismatch(const std::string& detail)
    : Error("checkpoint version mismatch: " + detail) {}

CorruptCheckpoint::CorruptCheckpoint(const std::string& detail)
    : Error("corrupt checkpoint: " + detail) {}

MissingArtifact::MissingArtifact(const std::string& path)
    : Error("missing artifact: " + path) {}

ConfigError::ConfigError(const std::string& detail)
    : Error("config error: " + detail) {}

}  // namespace rewriter
