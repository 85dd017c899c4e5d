#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace riskcascade {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Malformed dataset record; carries the 1-based row number.
class FormatError : public Error {
public:
  FormatError(std::size_t row, const std::string& reason)
      : Error("row " + std::to_string(row) + ": " + reason), row_(row) {}
  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

/// No JSON object could be extracted from model output.
class ParseError : public Error {
public:
  using Error::Error;
};

/// A JSON object was found but a required field is missing or mistyped.
class SchemaError : public Error {
public:
  SchemaError(std::string field, const std::string& reason)
      : Error("field '" + field + "': " + reason), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

class TransportError : public Error {
public:
  using Error::Error;
};

/// The remote peer answered, but not with the agreed shape.
class ProtocolError : public Error {
public:
  using Error::Error;
};

/// Feature extraction failed for a post after all retries.
class AnalystError : public Error {
public:
  AnalystError(std::string post_id, const std::string& cause)
      : Error("analyst failed for post '" + post_id + "': " + cause),
        post_id_(std::move(post_id)) {}
  const std::string& post_id() const noexcept { return post_id_; }

private:
  std::string post_id_;
};

/// Training data lacks one of the two classes (or is otherwise unusable).
class DegenerateData : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class LengthMismatch : public Error {
public:
  using Error::Error;
};

class EmptyEvaluation : public Error {
public:
  using Error::Error;
};

}  // namespace riskcascade
