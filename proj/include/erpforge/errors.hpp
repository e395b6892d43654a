#pragma once

#include <stdexcept>
#include <string>

namespace erpforge {

enum class ErrorKind {
  size,
  window,
  channel,
  degenerate_weights,
  lookup,
  shape,
  domain,
  config,
  format,
  degenerate,
};

const char* to_string(ErrorKind kind);

// Single exception type carrying a machine-checkable kind. The CLI maps any
// Error to exit code 1; usage problems exit with 2 before reaching here.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace erpforge
