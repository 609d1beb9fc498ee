#pragma once

#include <stdexcept>
#include <string>

namespace circsynth {

// Coarse grouping used by the CLI to pick an exit status.
enum class ErrorCategory { config, numerics, synthesis };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, std::string kind, const std::string& msg)
      : std::runtime_error(msg), cat_(cat), kind_(std::move(kind)) {}
  ErrorCategory category() const { return cat_; }
  // Short machine-readable tag, e.g. "invalid-order".
  const std::string& kind() const { return kind_; }

 private:
  ErrorCategory cat_;
  std::string kind_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string kind, const std::string& msg)
      : Error(ErrorCategory::config, std::move(kind), msg) {}
};

class NumericsError : public Error {
 public:
  NumericsError(std::string kind, const std::string& msg)
      : Error(ErrorCategory::numerics, std::move(kind), msg) {}
};

class SynthesisError : public Error {
 public:
  SynthesisError(std::string kind, const std::string& msg)
      : Error(ErrorCategory::synthesis, std::move(kind), msg) {}
};

enum class Grammian { controllability, observability };

// Raised when a grammian is numerically rank deficient.
class DegeneracyError : public NumericsError {
 public:
  DegeneracyError(Grammian which, int deficit, const std::string& msg)
      : NumericsError(which == Grammian::controllability ? "controllability-degenerate"
                                                          : "observability-degenerate",
                      msg),
        which_(which),
        deficit_(deficit) {}
  Grammian which() const { return which_; }
  int deficit() const { return deficit_; }

 private:
  Grammian which_;
  int deficit_;
};

const char* category_name(ErrorCategory c);
int exit_code(ErrorCategory c);

}  // namespace circsynth
