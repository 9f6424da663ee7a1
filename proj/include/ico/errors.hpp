#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ico {

// Error taxonomy shared across the library. Each type maps to one failure
// mode named in the module contracts; callers catch the specific type or
// std::runtime_error.

struct DegenerateFit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IncompleteSnapshot : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientNodes : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config validation failure; carries the offending key path (dotted).
struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(std::string key_path, const std::string& message)
      : std::runtime_error(key_path + ": " + message), key(std::move(key_path)) {}
};

}  // namespace ico
