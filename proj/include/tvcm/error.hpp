#pragma once

#include <stdexcept>
#include <string>

namespace tvcm {

enum class ErrorKind {
  InvalidInput,
  InvalidModel,
  InvalidConfig,
  InvalidHyperparameter,
  Nonstationary,
  DegenerateWeights,
  SingularUpdate,
  DegenerateTest,
  Parse,
  Usage,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidModel: return "invalid-model";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::InvalidHyperparameter: return "invalid-hyperparameter";
    case ErrorKind::Nonstationary: return "nonstationary-error";
    case ErrorKind::DegenerateWeights: return "degenerate-weights";
    case ErrorKind::SingularUpdate: return "singular-update";
    case ErrorKind::DegenerateTest: return "degenerate-test";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::Usage: return "usage-error";
  }
  return "unknown";
}

/// Library error. The kind identifies the failure class; the message carries
/// location details (time index, row, iteration) where available.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tvcm
