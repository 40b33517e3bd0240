#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coword {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text that does not follow the expected grammar. `line` is 1-based,
// 0 when no line applies.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// Error raised inside the analysis pipeline, tagged with the failing stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace coword
