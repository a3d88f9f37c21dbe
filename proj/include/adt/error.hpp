#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace adt {

// Base of every error thrown by the library. `code` is a stable
// machine-readable tag; `stage` names the pipeline step that failed (may be
// empty outside the service pipeline).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, std::string stage = {})
      : std::runtime_error(message), code_(std::move(code)), stage_(std::move(stage)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  std::string code_;
  std::string stage_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("parse_error", "line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Invalid argument or violated precondition.
class InputError : public Error {
 public:
  explicit InputError(const std::string& message) : Error("input_error", message) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message) : Error("validation_error", message) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message) : Error("not_found", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config_error", message) {}
};

class TransportError : public Error {
 public:
  TransportError(const std::string& message, int retries)
      : Error("transport_error", message), retries_(retries) {}
  int retries() const noexcept { return retries_; }

 private:
  int retries_;
};

class MediaError : public Error {
 public:
  explicit MediaError(const std::string& message) : Error("media_error", message) {}
};

}  // namespace adt
