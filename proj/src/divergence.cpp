#include "npdetect/divergence.hpp"

#include <cmath>
#include <sstream>

#include "npdetect/error.hpp"

namespace npdetect {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    std::ostringstream os;
    os << "dimensions " << a << " and " << b << " differ";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

// (y, A^-1 y) through the eigenbasis of A.
double inverse_quadratic_form(const CovarianceMatrix& a, const Eigen::VectorXd& y) {
  const Eigen::VectorXd w = a.eigenvectors().transpose() * y;
  return (w.array().square() / a.eigenvalues().array()).sum();
}

}  // namespace

double kl_general(const CovarianceMatrix& v, const CovarianceMatrix& m) {
  require_same_dim(v.dim(), m.dim());
  // tr(V M^-1) = sum_i (t_i' V t_i) / lambda_i over eigenpairs of M.
  const Eigen::MatrixXd projected = m.eigenvectors().transpose() * v.entries() * m.eigenvectors();
  const double trace = (projected.diagonal().array() / m.eigenvalues().array()).sum();
  const double n = static_cast<double>(m.dim());
  return 0.5 * (m.log_det() - v.log_det()) + 0.5 * trace - 0.5 * n;
}

double kl_identity(const CovarianceMatrix& m) {
  const auto& lambda = m.eigenvalues().array();
  return 0.5 * (lambda.log() + lambda.inverse() - 1.0).sum();
}

LlrStatistic log_likelihood_ratio(const CovarianceMatrix& m, const Eigen::VectorXd& y) {
  require_same_dim(static_cast<std::size_t>(y.size()), m.dim());
  const double quad = inverse_quadratic_form(m, y) - y.squaredNorm();
  return {0.5 * (m.log_det() + quad)};
}

double log_density_ratio(const CovarianceMatrix& v, const CovarianceMatrix& m, const Eigen::VectorXd& y) {
  require_same_dim(v.dim(), m.dim());
  require_same_dim(static_cast<std::size_t>(y.size()), m.dim());
  return 0.5 * (m.log_det() - v.log_det() + inverse_quadratic_form(m, y) - inverse_quadratic_form(v, y));
}

}  // namespace npdetect
