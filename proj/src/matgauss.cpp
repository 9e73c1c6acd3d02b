#include "npdetect/matgauss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "npdetect/error.hpp"
#include "npdetect/rng.hpp"
#include "npdetect/spectral.hpp"

namespace npdetect {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct Decomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Eigen returns ascending eigenvalues; reorder descending, ties by solver index.
Decomposition sorted_decomposition(const Eigen::MatrixXd& a, bool with_vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "eigendecomposition did not converge");
  }
  const auto n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return ev(i) > ev(j); });

  Decomposition out;
  out.values.resize(n);
  if (with_vectors) out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = ev(order[static_cast<std::size_t>(k)]);
    if (with_vectors) out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Eigen::MatrixXd ar1_entries(double a, std::size_t n) {
  if (!(a >= 0.0 && a <= kMaxAr1)) {
    std::ostringstream os;
    os << "ar1 parameter a = " << a << " outside [0, " << kMaxAr1 << "]";
    throw Error(ErrorCode::BadParameter, os.str());
  }
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      m(i, j) = std::pow(a, static_cast<double>(std::abs(i - j)));
    }
  }
  return m;
}

void require_dimension(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadParameter, "dimension must be positive");
}

}  // namespace

void require_symmetric(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::AsymmetricInput, "matrix is not square");
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      const double scale = std::max(1.0, std::abs(a(i, j)));
      if (!(std::abs(a(i, j) - a(j, i)) / scale <= kSymTol)) {
        std::ostringstream os;
        os << "entries (" << i << "," << j << ") and (" << j << "," << i << ") differ";
        throw Error(ErrorCode::AsymmetricInput, os.str());
      }
    }
  }
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  return sorted_decomposition(a, false).values;
}

bool pd_by_eigenvalues(const Eigen::VectorXd& descending) {
  if (descending.size() == 0) return false;
  const double largest = descending(0);
  const double smallest = descending(descending.size() - 1);
  return smallest > kPdTol * std::max(std::abs(largest), 1.0);
}

bool is_positive_definite(const Eigen::MatrixXd& a) {
  require_symmetric(a);
  return pd_by_eigenvalues(symmetric_eigenvalues(a));
}

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0) throw Error(ErrorCode::BadParameter, "empty matrix");
  require_symmetric(entries_);
  // Exact symmetry downstream; the check above bounds the perturbation.
  entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
  auto dec = sorted_decomposition(entries_, true);
  const double largest = dec.values(0);
  const double smallest = dec.values(dec.values.size() - 1);
  if (!(smallest > kPdTol * largest) || !(largest > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "smallest eigenvalue " << smallest << " vs largest " << largest;
    throw Error(ErrorCode::NotPositiveDefinite, os.str());
  }
  eigenvalues_ = std::move(dec.values);
  eigenvectors_ = std::move(dec.vectors);
  log_det_ = eigenvalues_.array().log().sum();
}

Eigen::MatrixXd CovarianceMatrix::inverse() const {
  return eigenvectors_ * eigenvalues_.cwiseInverse().asDiagonal() * eigenvectors_.transpose();
}

Eigen::MatrixXd CovarianceMatrix::sqrt_factor() const {
  return eigenvectors_ * eigenvalues_.cwiseSqrt().asDiagonal();
}

CovarianceMatrix CovarianceMatrix::identity(std::size_t n) {
  require_dimension(n);
  const auto dim = static_cast<Eigen::Index>(n);
  return CovarianceMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

CovarianceMatrix CovarianceMatrix::diagonal(const std::vector<double>& eigenvalues) {
  if (eigenvalues.empty()) throw Error(ErrorCode::BadParameter, "empty eigenvalue list");
  for (double v : eigenvalues) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::BadParameter, "diagonal entries must be positive and finite");
    }
  }
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(),
                                                        static_cast<Eigen::Index>(eigenvalues.size()));
  return CovarianceMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

CovarianceMatrix build(const CovarianceSpec& s) {
  return std::visit(
      Overloaded{
          [](const spec::Dense& d) { return CovarianceMatrix(d.entries); },
          [](const spec::Diagonal& d) { return CovarianceMatrix::diagonal(d.eigenvalues); },
          [](const spec::ScaledIdentity& d) {
            require_dimension(d.n);
            if (!(d.c > 0.0) || !std::isfinite(d.c)) {
              throw Error(ErrorCode::BadParameter, "scaled_identity requires c > 0");
            }
            const auto dim = static_cast<Eigen::Index>(d.n);
            return CovarianceMatrix(d.c * Eigen::MatrixXd::Identity(dim, dim));
          },
          [](const spec::Ar1& d) {
            require_dimension(d.n);
            return CovarianceMatrix(ar1_entries(d.a, d.n));
          },
          [](const spec::ToeplitzFromSpectrum& d) {
            require_dimension(d.n);
            return toeplitz_from_spectrum(d.density, d.n);
          },
      },
      s);
}

std::vector<Eigen::VectorXd> sample_gaussian(const CovarianceMatrix& m, std::uint64_t seed,
                                             std::size_t count) {
  const Eigen::MatrixXd factor = m.sqrt_factor();
  const auto n = static_cast<Eigen::Index>(m.dim());
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  Eigen::VectorXd z(n);
  for (std::size_t k = 0; k < count; ++k) {
    auto gen = substream(seed, StreamTag::Sampling, k);
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(gen);
    out.emplace_back(factor * z);
  }
  return out;
}

}  // namespace npdetect
