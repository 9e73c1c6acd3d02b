#pragma once

#include <stdexcept>
#include <string>

namespace npdetect {

enum class ErrorCode {
  NotPositiveDefinite,
  AsymmetricInput,
  BadParameter,
  DimensionMismatch,
  LengthMismatch,
  DegenerateStatistic,
  BadAlpha,
  BadExponent,
  EmptyFamily,
  IntegrandNonpositive,
  MomentInfinite,
};

const char* to_string(ErrorCode code) noexcept;

/// Math-domain failure raised by the library. The CLI maps these to exit code 3.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Spectral integrand 1 + fS(fK - fS)/(1 + fS)^2 is not positive at `omega`.
class IntegrandNonpositiveError : public Error {
 public:
  IntegrandNonpositiveError(double omega, double value);

  double omega() const noexcept { return omega_; }
  double value() const noexcept { return value_; }

 private:
  double omega_;
  double value_;
};

}  // namespace npdetect
