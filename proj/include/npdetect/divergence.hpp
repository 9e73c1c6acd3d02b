#pragma once

#include <Eigen/Dense>

#include "npdetect/matgauss.hpp"

namespace npdetect {

/// Log-likelihood ratio ln(p_I / p_M)(y), in nats.
struct LlrStatistic {
  double value;
};

/// D(N(0,V) || N(0,M)) = 1/2 ln(|M|/|V|) + 1/2 tr(V M^-1) - n/2.
double kl_general(const CovarianceMatrix& v, const CovarianceMatrix& m);

/// D(N(0,I) || N(0,M)) = 1/2 sum(ln lambda_i + 1/lambda_i - 1).
double kl_identity(const CovarianceMatrix& m);

/// f_M(y) = 1/2 [ln|M| + (y, (M^-1 - I) y)].
LlrStatistic log_likelihood_ratio(const CovarianceMatrix& m, const Eigen::VectorXd& y);

/// ln p_V(y) - ln p_M(y) via the eigendecompositions of both matrices.
double log_density_ratio(const CovarianceMatrix& v, const CovarianceMatrix& m, const Eigen::VectorXd& y);

}  // namespace npdetect
