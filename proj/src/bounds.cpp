#include "npdetect/bounds.hpp"

#include <cmath>
#include <sstream>

#include "npdetect/detector.hpp"
#include "npdetect/divergence.hpp"
#include "npdetect/error.hpp"

namespace npdetect {

double binary_entropy(double alpha) {
  require_alpha(alpha);
  return -alpha * std::log(alpha) - (1.0 - alpha) * std::log1p(-alpha);
}

double stein_lower(const CovarianceMatrix& m, double alpha) {
  const double h = binary_entropy(alpha);
  return -(kl_identity(m) + h) / (1.0 - alpha);
}

double stein_upper(const CovarianceMatrix& m, double /*alpha*/, double mu0) {
  return -kl_identity(m) + mu0;
}

SteinBounds stein_bounds(const CovarianceMatrix& m, double alpha, double mu0) {
  SteinBounds b{};
  b.d = kl_identity(m);
  b.h_alpha = binary_entropy(alpha);
  b.mu0 = mu0;
  b.lower_log_beta = -(b.d + b.h_alpha) / (1.0 - alpha);
  b.upper_log_beta = -b.d + mu0;
  return b;
}

double cp_constant(const CovarianceMatrix& m, double p) {
  if (!(p > 1.0 && p <= 2.0)) {
    std::ostringstream os;
    os << "exponent p = " << p << " outside (1, 2]";
    throw Error(ErrorCode::BadExponent, os.str());
  }
  const auto& lambda = m.eigenvalues().array();
  return (lambda.inverse() - 1.0).abs().pow(p).sum() / static_cast<double>(m.dim());
}

double mu0_upper_bound(const CovarianceMatrix& m, double alpha, double p) {
  require_alpha(alpha);
  const double cp = cp_constant(m, p);
  return std::pow(3.0 * cp * static_cast<double>(m.dim()) / alpha, 1.0 / p);
}

}  // namespace npdetect
