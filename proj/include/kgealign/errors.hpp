#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgealign {

enum class ErrorKind {
  io,           // file cannot be opened/read/written
  syntax,       // malformed input, carries a line or row number
  unsupported,  // construct outside the supported input subset
  invalid,      // contract violation (bad argument, bad config)
  divergence,   // non-finite loss during training
  mismatch,     // incompatible shapes/sizes between artifacts
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::size_t line = 0)
      : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ")"
                                    : message),
        kind_(kind),
        line_(line) {}

  ErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  ErrorKind kind_;
  std::size_t line_;
};

inline Error io_error(std::string msg) { return Error(ErrorKind::io, std::move(msg)); }
inline Error syntax_error(std::string msg, std::size_t line) {
  return Error(ErrorKind::syntax, std::move(msg), line);
}
inline Error unsupported_error(std::string construct, std::size_t line) {
  return Error(ErrorKind::unsupported, "unsupported construct: " + construct, line);
}
inline Error invalid_error(std::string msg) { return Error(ErrorKind::invalid, std::move(msg)); }

}  // namespace kgealign
