#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rewriter {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t token_index, const std::string& expected,
              const std::string& got);
  std::size_t token_index;
  std::string expected;
  std::string got;
};

class UnresolvedColumn : public Error {
 public:
  UnresolvedColumn(const std::string& name,
                   const std::vector<std::string>& candidates);
  std::string name;
  std::vector<std::string> candidates;
};

class UnsupportedFeature : public Error {
 public:
  explicit UnsupportedFeature(const std::string& construct);
  std::string construct;
};

class UnknownRule : public Error {
 public:
  explicit UnknownRule(const std::string& rule_name);
  std::string rule_name;
};

class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(const std::string& detail);
};

class DivisionByZero : public Error {
 public:
  explicit DivisionByZero(const std::string& row_context);
  std::string row_context;
};

class EmitError : public Error {
 public:
  explicit EmitError(const std::string& detail);
};

class EmptyCandidates : public Error {
 public:
  EmptyCandidates();
};

class EmptyPool : public Error {
 public:
  EmptyPool();
};

class EmptyDataset : public Error {
 public:
  EmptyDataset();
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& detail);
};

class NonFiniteLoss : public Error {
 public:
  explicit NonFiniteLoss(std::size_t triplet_index);
  std::size_t triplet_index;
};

class BackendUnavailable : public Error {
 public:
  explicit BackendUnavailable(const std::string& detail);
};

class VersionMismatch : public Error {
 public:
  explicit VersionMismatch(const std::string& detail);
};

class CorruptCheckpoint : public Error {
 public:
  explicit CorruptCheckpoint(const std::string& detail);
};

class MissingArtifact : public Error {
 public:
  explicit MissingArtifact(const std::string& path);
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& detail);
};

}  // namespace rewriter
