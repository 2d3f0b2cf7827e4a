#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anibem {

enum class Errc {
  NonConvergent,
  DomainError,
  InvalidSpec,
  OffCurve,
  CoincidentPoints,
  NonFinite,
  QuadratureFailure,
  DimensionMismatch,
  NotBracketed,
  NoRankLoss,
  OutsideRegion,
  ConfigError,
  IoError,
};

std::string_view to_string(Errc code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace anibem
