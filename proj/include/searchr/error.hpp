#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace searchr {

/// Base class for every error raised by the engine. Errors that derive from
/// UserError are caused by bad input or configuration; anything else that
/// escapes is treated as an internal failure by the CLI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UserError : public Error {
 public:
  using Error::Error;
};

/// A precondition of a public operation was violated (bad index, dimension
/// mismatch, invalid parameter range).
class ContractViolation : public UserError {
 public:
  using UserError::UserError;
};

/// Malformed CoNLL-U or JSONL input. Carries the 1-based line number.
class ParseError : public UserError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : UserError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Head links that do not form a single rooted tree.
class StructuralError : public UserError {
 public:
  StructuralError(std::string sentence_id, const std::string& what)
      : UserError("sentence '" + sentence_id + "': " + what),
        sentence_id_(std::move(sentence_id)) {}

  const std::string& sentence_id() const noexcept { return sentence_id_; }

 private:
  std::string sentence_id_;
};

/// Cross-file inconsistencies found while assembling a corpus.
class IngestionError : public UserError {
 public:
  using UserError::UserError;
};

/// The on-disk index is unreadable or written by an incompatible version.
class FormatError : public UserError {
 public:
  using UserError::UserError;
};

class ConfigError : public UserError {
 public:
  using UserError::UserError;
};

/// The generator backend could not be reached.
class TransportError : public UserError {
 public:
  using UserError::UserError;
};

/// The generator replied with text that does not satisfy the template's
/// parse rule, even after a retry.
class ProtocolError : public UserError {
 public:
  ProtocolError(const std::string& what, std::string raw_reply)
      : UserError(what), raw_reply_(std::move(raw_reply)) {}

  const std::string& raw_reply() const noexcept { return raw_reply_; }

 private:
  std::string raw_reply_;
};

}  // namespace searchr
