#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arbench {

enum class Errc {
  InvalidArgument,
  NearSingular,
  NotSymmetric,
  NonStationary,
  DegenerateSeries,
  ZeroVariance,
  ParseError,
  MissingWarmup,
  Diverged,
  TooShort,
  LengthMismatch,
  EmptyInput,
  Io,
  Config,
};

std::string_view errc_name(Errc code) noexcept;

/// Single exception type for the library; the code says which contract failed.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace arbench
