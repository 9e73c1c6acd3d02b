#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "npdetect/spectral_density.hpp"

namespace npdetect {

inline constexpr double kSymTol = 1e-10;
inline constexpr double kPdTol = 1e-10;
inline constexpr double kMaxAr1 = 0.999;

namespace spec {
struct Dense {
  Eigen::MatrixXd entries;
};
struct Diagonal {
  std::vector<double> eigenvalues;
};
struct ScaledIdentity {
  double c;
  std::size_t n;
};
struct Ar1 {
  double a;
  std::size_t n;
};
struct ToeplitzFromSpectrum {
  SpectralDensity density;
  std::size_t n;
};
}  // namespace spec

using CovarianceSpec =
    std::variant<spec::Dense, spec::Diagonal, spec::ScaledIdentity, spec::Ar1, spec::ToeplitzFromSpectrum>;

/// Symmetric positive-definite matrix together with its eigendecomposition
/// entries = T diag(lambda) T'. Eigenvalues are sorted descending.
class CovarianceMatrix {
 public:
  /// Validates symmetry and positive definiteness and decomposes `entries`.
  explicit CovarianceMatrix(Eigen::MatrixXd entries);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }

  /// sum of ln(lambda_i)
  double log_det() const noexcept { return log_det_; }
  /// T diag(1/lambda) T'
  Eigen::MatrixXd inverse() const;
  /// T diag(sqrt(lambda)), the sampling factor.
  Eigen::MatrixXd sqrt_factor() const;

  static CovarianceMatrix identity(std::size_t n);
  static CovarianceMatrix diagonal(const std::vector<double>& eigenvalues);

 private:
  Eigen::MatrixXd entries_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double log_det_ = 0.0;
};

CovarianceMatrix build(const CovarianceSpec& spec);

/// Throws AsymmetricInput if A is not square or not symmetric within kSymTol.
void require_symmetric(const Eigen::MatrixXd& a);

/// Smallest eigenvalue > kPdTol * max(|largest eigenvalue|, 1).
bool is_positive_definite(const Eigen::MatrixXd& a);

/// Symmetric eigenvalues of A, sorted descending.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);

bool pd_by_eigenvalues(const Eigen::VectorXd& descending);

/// `count` draws from N(0, M) as T diag(sqrt(lambda)) z. Draw k uses the
/// sub-stream (seed, k).
std::vector<Eigen::VectorXd> sample_gaussian(const CovarianceMatrix& m, std::uint64_t seed,
                                             std::size_t count);

}  // namespace npdetect
