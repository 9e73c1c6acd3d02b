#include "npdetect/detector.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "npdetect/divergence.hpp"
#include "npdetect/error.hpp"
#include "npdetect/parallel.hpp"
#include "npdetect/rng.hpp"

namespace npdetect {

const char* to_string(Hypothesis h) noexcept { return h == Hypothesis::H0 ? "H0" : "H1"; }

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "alpha = " << alpha << " outside (0, 1)";
    throw Error(ErrorCode::BadAlpha, os.str());
  }
}

std::size_t quantile_rank(double alpha, std::size_t count) {
  const double product = alpha * static_cast<double>(count);
  const double nearest = std::round(product);
  double rank = std::abs(product - nearest) <= 1e-9 * std::max(1.0, product) ? nearest : std::ceil(product);
  rank = std::clamp(rank, 1.0, static_cast<double>(count));
  return static_cast<std::size_t>(rank);
}

std::vector<double> sample_noise_llr(const CovarianceMatrix& m, std::size_t samples, std::uint64_t seed) {
  const Eigen::ArrayXd weight = m.eigenvalues().array().inverse() - 1.0;
  const double log_det = m.log_det();
  const auto n = weight.size();
  std::vector<double> values(samples);
  parallel_for(samples, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      auto gen = substream(seed, StreamTag::Calibration, t);
      std::normal_distribution<double> normal;
      double quad = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double z = normal(gen);
        quad += weight(i) * z * z;
      }
      values[t] = 0.5 * (log_det + quad);
    }
  });
  return values;
}

Detector calibrate(const CovarianceMatrix& m, double alpha, std::size_t mc_samples, std::uint64_t seed) {
  require_alpha(alpha);
  if (mc_samples < kMinCalibrationSamples) {
    std::ostringstream os;
    os << "mc_samples = " << mc_samples << " below minimum " << kMinCalibrationSamples;
    throw Error(ErrorCode::BadParameter, os.str());
  }
  const bool degenerate = (m.eigenvalues().array() - 1.0).abs().maxCoeff() <= 1e-12;
  if (degenerate) {
    throw Error(ErrorCode::DegenerateStatistic, "M = I makes the log-likelihood ratio constant");
  }
  auto values = sample_noise_llr(m, mc_samples, seed);
  const std::size_t rank = quantile_rank(alpha, mc_samples);
  auto kth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), kth, values.end());
  const double gamma = *kth;
  const double mu0 = kl_identity(m) - gamma;
  return Detector{m, alpha, gamma, mu0, Calibration{mc_samples, seed}};
}

Hypothesis decide(const Detector& det, const Eigen::VectorXd& y) {
  return log_likelihood_ratio(det.m, y).value >= det.gamma ? Hypothesis::H0 : Hypothesis::H1;
}

double mu0_quantile(const CovarianceMatrix& m, double alpha, std::size_t mc_samples, std::uint64_t seed) {
  return calibrate(m, alpha, mc_samples, seed).mu0;
}

}  // namespace npdetect
