#include <catch_amalgamated.hpp>

#include <cmath>

#include "npdetect/error.hpp"
#include "npdetect/matgauss.hpp"
#include "npdetect/spectral.hpp"
#include "test_helpers.hpp"

using namespace npdetect;
using Catch::Approx;

namespace {

double reconstruction_error(const CovarianceMatrix& m) {
  const Eigen::MatrixXd rebuilt = m.eigenvectors() * m.eigenvalues().asDiagonal() * m.eigenvectors().transpose();
  return (rebuilt - m.entries()).norm() / m.entries().norm();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected npdetect::Error");
  return ErrorCode::BadParameter;
}

}  // namespace

TEST_CASE("build: closed-form families", "[matgauss]") {
  SECTION("scaled identity c=1 is the identity") {
    const auto m = build(spec::ScaledIdentity{1.0, 3});
    REQUIRE(m.entries().isApprox(Eigen::MatrixXd::Identity(3, 3)));
    for (int i = 0; i < 3; ++i) REQUIRE(m.eigenvalues()(i) == Approx(1.0));
  }
  SECTION("ar1 with a=0 is the identity") {
    const auto m = build(spec::Ar1{0.0, 4});
    REQUIRE(m.entries() == Eigen::MatrixXd::Identity(4, 4));
  }
  SECTION("ar1 a=0.5 n=2 has eigenvalues 1 +- a, descending") {
    const auto m = build(spec::Ar1{0.5, 2});
    REQUIRE(m.entries()(0, 1) == 0.5);
    REQUIRE(m.entries()(1, 0) == 0.5);
    REQUIRE(m.eigenvalues()(0) == Approx(1.5).epsilon(1e-14));
    REQUIRE(m.eigenvalues()(1) == Approx(0.5).epsilon(1e-14));
  }
  SECTION("ar1 entries are a^|i-j|") {
    const auto m = build(spec::Ar1{0.7, 6});
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) REQUIRE(m.entries()(i, j) == Approx(std::pow(0.7, std::abs(i - j))));
  }
}

TEST_CASE("build: error paths", "[matgauss]") {
  CHECK(code_of([] { build(spec::Ar1{1.0, 3}); }) == ErrorCode::BadParameter);
  CHECK(code_of([] { build(spec::Ar1{-0.1, 3}); }) == ErrorCode::BadParameter);
  CHECK(code_of([] { build(spec::Diagonal{{1.0, 0.0}}); }) == ErrorCode::BadParameter);
  CHECK(code_of([] { build(spec::ScaledIdentity{-1.0, 2}); }) == ErrorCode::BadParameter);

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.2, 0.3, 1.0;
  CHECK(code_of([&] { build(spec::Dense{asym}); }) == ErrorCode::AsymmetricInput);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK(code_of([&] { build(spec::Dense{indefinite}); }) == ErrorCode::NotPositiveDefinite);

  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  CHECK(code_of([&] { build(spec::Dense{singular}); }) == ErrorCode::NotPositiveDefinite);
}

TEST_CASE("is_positive_definite", "[matgauss]") {
  CHECK(is_positive_definite(Eigen::MatrixXd::Identity(3, 3)));
  Eigen::MatrixXd d = Eigen::Vector2d(1.0, -0.5).asDiagonal();
  CHECK_FALSE(is_positive_definite(d));
  // Scalar guard I + V^-1 - M^-1 with M = 0.5, V = 4.
  Eigen::MatrixXd guard(1, 1);
  guard << 1.0 + 1.0 / 4.0 - 1.0 / 0.5;
  CHECK(guard(0, 0) == Approx(-0.75));
  CHECK_FALSE(is_positive_definite(guard));

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.0, 1e-3, 1.0;
  CHECK(code_of([&] { is_positive_definite(asym); }) == ErrorCode::AsymmetricInput);
}

TEST_CASE("decomposition invariants on random dense matrices", "[matgauss][property]") {
  std::mt19937_64 gen(20211);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + gen() % 40;
    const auto q = test::random_orthogonal(n, gen);
    const auto m = test::rotated(q, test::random_spectrum(n, 0.05, 20.0, gen));
    CHECK(reconstruction_error(m) < 1e-8);
    const Eigen::MatrixXd gram = m.eigenvectors().transpose() * m.eigenvectors();
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index i = 1; i < m.eigenvalues().size(); ++i) CHECK(m.eigenvalues()(i - 1) >= m.eigenvalues()(i));
    CHECK(m.eigenvalues().minCoeff() > kPdTol * m.eigenvalues().maxCoeff());
    // inverse through the eigenbasis
    CHECK((m.inverse() * m.entries() - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).norm() < 1e-9);
  }
}

TEST_CASE("ar1 determinant is (1 - a^2)^(n-1)", "[matgauss][property]") {
  for (double a : {0.0, 0.3, 0.5, 0.7, 0.9}) {
    for (std::size_t n : {1u, 2u, 5u, 16u, 32u}) {
      const auto m = build(spec::Ar1{a, n});
      const double expected = (static_cast<double>(n) - 1.0) * std::log1p(-a * a);
      // log scale comparison, equivalent to relative 1e-8 on the determinant
      CHECK(std::abs(m.log_det() - expected) < 1e-8);
    }
  }
}

TEST_CASE("ar1 agrees with the Toeplitz matrix of its Poisson-kernel spectrum", "[matgauss][spectral]") {
  for (double a : {0.0, 0.3, 0.7}) {
    for (std::size_t n : {1u, 8u, 33u, 64u}) {
      const auto direct = build(spec::Ar1{a, n});
      const auto bridged = build(spec::ToeplitzFromSpectrum{ar1_spectrum(a), n});
      CHECK((direct.entries() - bridged.entries()).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("sample_gaussian", "[matgauss][mc]") {
  SECTION("identity: coordinate means near zero") {
    const auto id = CovarianceMatrix::identity(2);
    const auto draws = sample_gaussian(id, 42, 100'000);
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& d : draws) mean += d;
    mean /= static_cast<double>(draws.size());
    CHECK(std::abs(mean(0)) < 0.02);
    CHECK(std::abs(mean(1)) < 0.02);
  }
  SECTION("diag(4): variance in [3.9, 4.1]") {
    const auto m = CovarianceMatrix::diagonal({4.0});
    const auto draws = sample_gaussian(m, 9, 100'000);
    double s = 0.0, s2 = 0.0;
    for (const auto& d : draws) {
      s += d(0);
      s2 += d(0) * d(0);
    }
    const double nd = static_cast<double>(draws.size());
    const double var = (s2 - s * s / nd) / (nd - 1.0);
    CHECK(var >= 3.9);
    CHECK(var <= 4.1);
  }
  SECTION("bit-identical for the same (M, seed, count)") {
    const auto m = build(spec::Ar1{0.6, 5});
    const auto a = sample_gaussian(m, 1234, 500);
    const auto b = sample_gaussian(m, 1234, 500);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) REQUIRE((a[k].array() == b[k].array()).all());
    const auto prefix = sample_gaussian(m, 1234, 10);
    for (std::size_t k = 0; k < prefix.size(); ++k) REQUIRE((a[k].array() == prefix[k].array()).all());
  }
  SECTION("sample covariance converges to M") {
    const auto m = build(spec::Ar1{0.5, 3});
    const auto draws = sample_gaussian(m, 77, 200'000);
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    for (const auto& d : draws) acc += d * d.transpose();
    acc /= static_cast<double>(draws.size());
    CHECK((acc - m.entries()).cwiseAbs().maxCoeff() < 0.02);
  }
}
