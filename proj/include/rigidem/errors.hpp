#pragma once

#include <stdexcept>
#include <string>

namespace rigidem {

// Every failure the library can raise carries a short machine-readable code
// plus a human-readable detail string.  The command line tool prints them as
// one line:  "error <code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(detail), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& detail) : Error("config", detail) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& detail) : Error("domain", detail) {}
};

struct GeometryError : Error {
  explicit GeometryError(const std::string& detail) : Error("geometry", detail) {}
};

struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& detail) : Error("convergence", detail) {}
};

struct IoError : Error {
  explicit IoError(const std::string& detail) : Error("io", detail) {}
};

}  // namespace rigidem
