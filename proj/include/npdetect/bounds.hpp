#pragma once

#include "npdetect/matgauss.hpp"

namespace npdetect {

/// Analytic bounds on the optimal miss probability at level alpha.
struct SteinBounds {
  double lower_log_beta;
  double upper_log_beta;
  double d;        // D(I || M)
  double h_alpha;  // binary entropy of alpha
  double mu0;
};

/// h(alpha) = -alpha ln alpha - (1 - alpha) ln(1 - alpha), in nats.
double binary_entropy(double alpha);

/// ln beta(alpha) >= -(D + h(alpha)) / (1 - alpha).
double stein_lower(const CovarianceMatrix& m, double alpha);

/// ln beta(alpha) <= -D + mu0. `alpha` is the level mu0 was computed for.
double stein_upper(const CovarianceMatrix& m, double alpha, double mu0);

SteinBounds stein_bounds(const CovarianceMatrix& m, double alpha, double mu0);

/// C_p = (1/n) sum |1/lambda_i - 1|^p for 1 < p <= 2.
double cp_constant(const CovarianceMatrix& m, double p);

/// mu0 <= (3 C_p n / alpha)^(1/p).
double mu0_upper_bound(const CovarianceMatrix& m, double alpha, double p);

}  // namespace npdetect
