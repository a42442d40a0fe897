#pragma once

#include <stdexcept>
#include <string>

namespace colearn {

// Out-of-range or inconsistent arguments to a library operation.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A structurally invalid graph (self-loop, duplicate edge, disconnected, ...).
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arm-means input. Carries the 1-based line number when known.
class IngestionError : public std::runtime_error {
 public:
  IngestionError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Invalid experiment configuration, naming the offending key and line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, std::size_t line, const std::string& what)
      : std::runtime_error(format(key, line, what)), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, std::size_t line, const std::string& what) {
    std::string out;
    if (line != 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "'" + key + "': ";
    return out + what;
  }

  std::string key_;
  std::size_t line_;
};

// Raised when a numeric procedure fails to converge (e.g. mixing on a bipartite graph).
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace colearn
