#pragma once

#include <stdexcept>
#include <string>

namespace sacot {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnparsedSentence : public Error {
 public:
  UnparsedSentence(std::string text, int tag)
      : Error("unparsed sentence (Rule" + std::to_string(tag) + "): " + text),
        text_(std::move(text)),
        tag_(tag) {}

  const std::string& text() const noexcept { return text_; }
  int tag() const noexcept { return tag_; }

 private:
  std::string text_;
  int tag_;
};

class UnparsedQuestion : public Error {
 public:
  explicit UnparsedQuestion(const std::string& text) : Error("unparsed question: " + text) {}
};

class OracleUnsolvable : public Error {
 public:
  using Error::Error;
};

/// Both the query and its negation are entailed.
class AmbiguousAnswer : public Error {
 public:
  using Error::Error;
};

class NonHaltingTrace : public Error {
 public:
  NonHaltingTrace() : Error("trace has no Validate step") {}
};

class MissingDemonstrations : public Error {
 public:
  MissingDemonstrations() : Error("few-shot prompt requires at least one demonstration") {}
};

class UntaggedRules : public Error {
 public:
  explicit UntaggedRules(const std::string& id) : Error("instance " + id + " has no tagged rules") {}
};

class FileNotFound : public Error {
 public:
  explicit FileNotFound(const std::string& path) : Error("file not found: " + path) {}
};

class SchemaMismatch : public Error {
 public:
  SchemaMismatch(std::size_t record, const std::string& why)
      : Error("schema mismatch at record " + std::to_string(record) + ": " + why), record_(record) {}

  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

class EndpointError : public Error {
 public:
  EndpointError(int status, const std::string& why)
      : Error("endpoint error (status " + std::to_string(status) + "): " + why), status_(status) {}

  /// HTTP status, or -1 when no response was received.
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class CacheCorruption : public Error {
 public:
  CacheCorruption(const std::string& path, std::size_t line)
      : Error("corrupt cache record at " + path + ":" + std::to_string(line)) {}
};

}  // namespace sacot
