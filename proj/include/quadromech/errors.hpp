#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quadromech {

enum class ErrorCode {
  InvalidTruncation,
  Shape,
  Type,
  InvalidRate,
  Domain,
  Degeneracy,
  UndefinedCorrelation,
  TruncationDivergence,
  Singularity,
  InvalidSpec,
  ConfigNotFound,
  ConfigInvalid,
  Io,
  Internal,
};

/// Machine-readable name, e.g. "CONFIG_NOT_FOUND".
std::string_view to_string(ErrorCode code);

/// Validation-class errors map to CLI exit code 1, everything else to 2.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace quadromech
