#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "npdetect/matgauss.hpp"

namespace npdetect {

enum class Hypothesis { H0, H1 };

const char* to_string(Hypothesis h) noexcept;

inline constexpr std::size_t kMinCalibrationSamples = 10'000;

struct Calibration {
  std::size_t samples;
  std::uint64_t seed;
};

/// Likelihood-ratio detector calibrated to false-alarm level alpha.
///
/// Decides H0 (noise) on the closed region f_M(y) >= gamma. The threshold and
/// mu0 satisfy gamma + mu0 = D(I || M).
struct Detector {
  CovarianceMatrix m;
  double alpha;
  double gamma;
  double mu0;
  Calibration calibration;
};

/// gamma is the order statistic at 1-based index ceil(alpha * samples) of
/// f_M(xi), xi ~ N(0, I), sampled in the eigenbasis of M as
/// 1/2 [sum ln lambda_i + sum (1/lambda_i - 1) z_i^2].
Detector calibrate(const CovarianceMatrix& m, double alpha, std::size_t mc_samples, std::uint64_t seed);

Hypothesis decide(const Detector& det, const Eigen::VectorXd& y);

double mu0_quantile(const CovarianceMatrix& m, double alpha, std::size_t mc_samples, std::uint64_t seed);

/// Draws of f_M(xi) under the noise hypothesis, in trial order.
std::vector<double> sample_noise_llr(const CovarianceMatrix& m, std::size_t samples, std::uint64_t seed);

/// 1-based index ceil(alpha * count), guarded against round-off in the product.
std::size_t quantile_rank(double alpha, std::size_t count);

void require_alpha(double alpha);

}  // namespace npdetect
