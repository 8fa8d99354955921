#pragma once

#include <stdexcept>
#include <string>

namespace cenlad {

enum class ErrorCode {
  kDimensionMismatch,
  kEmptyData,
  kInvalidArgument,
  kNonFinite,
  kUndefinedSnr,
  kNoUncensoredRows,
  kNotSymmetric,
  kIo,
  kParse,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for every recoverable failure in the library.
/// Callers switch on code(); what() carries the context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cenlad
