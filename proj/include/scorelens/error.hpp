#pragma once

#include <stdexcept>
#include <string>

namespace scorelens {

// Error taxonomy. The service maps these onto HTTP status codes and the CLI
// onto exit codes, so every thrown error should be one of these.

/// Caller supplied something invalid (HTTP 400, CLI exit 1).
class InvalidArgument : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A named entity (model, assignment, example, job, tokenizer) does not exist.
class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A wire payload did not match its schema. `field()` is a dotted path such
/// as "attention.window".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string field, const std::string& what)
      : std::runtime_error("schema violation at '" + field + "': " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An external scorer failed (unreachable, timeout, non-success status).
class ExternalError : public std::runtime_error {
 public:
  ExternalError(std::string endpoint, const std::string& what)
      : std::runtime_error(endpoint + ": " + what), endpoint_(std::move(endpoint)) {}

  const std::string& endpoint() const noexcept { return endpoint_; }

 private:
  std::string endpoint_;
};

/// Internal engine failure (I/O, invariant breach).
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scorelens
