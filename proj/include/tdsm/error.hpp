#pragma once

#include <stdexcept>
#include <string>

namespace tdsm {

/// Broad failure category; the CLI maps these onto exit codes.
enum class ErrorKind {
  invalid_argument,
  config,
  solver,
  io,
  format,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) {
    fail(ErrorKind::invalid_argument, what);
  }
}

}  // namespace tdsm
