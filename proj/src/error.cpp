#include "npdetect/error.hpp"

#include <sstream>

namespace npdetect {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateStatistic: return "DegenerateStatistic";
    case ErrorCode::BadAlpha: return "BadAlpha";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::EmptyFamily: return "EmptyFamily";
    case ErrorCode::IntegrandNonpositive: return "IntegrandNonpositive";
    case ErrorCode::MomentInfinite: return "MomentInfinite";
  }
  return "Unknown";
}

namespace {
std::string integrand_message(double omega, double value) {
  std::ostringstream os;
  os.precision(17);
  os << "integrand argument " << value << " <= 0 at omega = " << omega;
  return os.str();
}
}  // namespace

IntegrandNonpositiveError::IntegrandNonpositiveError(double omega, double value)
    : Error(ErrorCode::IntegrandNonpositive, integrand_message(omega, value)),
      omega_(omega),
      value_(value) {}

}  // namespace npdetect
