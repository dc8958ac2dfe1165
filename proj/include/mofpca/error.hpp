#pragma once

#include <stdexcept>
#include <string>

namespace mofpca {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  success = 0,
  failure = 1,
  input_error = 2,
  config_error = 3,
  enumeration_cap = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Bad input data: missing files, malformed CSV, invalid selections.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ExitCode::input_error, what) {}
};

// Invalid algorithm configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::config_error, what) {}
};

// Exhaustive enumeration refused because C(d, r) exceeds the cap.
class EnumerationCapError : public Error {
 public:
  explicit EnumerationCapError(const std::string& what) : Error(ExitCode::enumeration_cap, what) {}
};

}  // namespace mofpca
