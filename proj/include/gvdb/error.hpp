#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gvdb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input. `line()` is 1-based.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Invalid parameters (bad k, inverted rectangle, empty keyword, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Unknown layer or node.
class NotFoundError : public Error {
public:
  using Error::Error;
};

/// Filtering under a threshold left no node in the layer.
class EmptyLayerError : public Error {
public:
  using Error::Error;
};

/// Store build failure or an unreadable store file.
class StoreError : public Error {
public:
  using Error::Error;
};

}  // namespace gvdb
