#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "npdetect/detector.hpp"
#include "npdetect/matgauss.hpp"

namespace npdetect {

inline constexpr std::size_t kMinTrials = 1'000;
inline constexpr double kWilsonZ95 = 1.959963984540054;

struct DetectorSettings {
  CovarianceSpec m;
  double alpha;
  std::size_t calibration_samples;
  std::uint64_t calibration_seed;
};

/// `truth` empty means data are pure noise N(0, I) and the false-alarm rate is
/// estimated; otherwise data are N(0, truth) and the miss rate is estimated.
struct ExperimentConfig {
  DetectorSettings detector;
  std::optional<CovarianceSpec> truth;
  std::size_t trials;
  std::uint64_t seed;
};

struct Provenance {
  std::uint64_t trial_seed;
  std::uint64_t calibration_seed;
};

struct ExperimentResult {
  std::size_t hit_count;
  std::size_t trials;
  std::size_t n;
  double rate;
  double ci_lo;
  double ci_hi;
  double log_rate;     // -inf when hit_count == 0
  double log_std_err;  // delta-method standard error of log_rate; +inf when hit_count == 0
  double exponent;     // -log_rate / n
  Provenance seeds;
};

struct Interval {
  double lo;
  double hi;
};

/// Wilson score interval. With zero hits the upper end is the rule of three, 3 / trials.
Interval wilson_interval(std::size_t hits, std::size_t trials, double z = kWilsonZ95);

/// Fraction of N(0, I) trials on which the detector decides H1.
ExperimentResult estimate_false_alarm(const Detector& det, std::size_t trials, std::uint64_t seed);

/// Fraction of N(0, V) trials on which the detector decides H0.
ExperimentResult estimate_miss(const Detector& det, const CovarianceMatrix& v, std::size_t trials,
                               std::uint64_t seed);

Detector calibrate(const DetectorSettings& settings);

ExperimentResult estimate_false_alarm(const ExperimentConfig& cfg);
ExperimentResult estimate_miss(const ExperimentConfig& cfg, const CovarianceMatrix& v);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct RobustnessResult {
  double log_beta_m;
  double log_beta_v;
  double log_moment;  // ln f(M, V)
  double mu0;
  double budget;      // ln f(M, V) + 2 mu0
  double sigma;       // combined log-scale standard error of both estimates
  bool holds;         // log_beta_v <= log_beta_m + budget + 3 sigma
  ExperimentResult miss_m;
  ExperimentResult miss_v;
};

/// Compares the miss rate of the M-calibrated detector when data come from V
/// against data from M. Throws MomentInfinite when f(M, V) is infinite.
/// calibration_samples == 0 uses max(trials, 10^4).
RobustnessResult robustness_experiment(const CovarianceMatrix& m, const CovarianceMatrix& v, double alpha,
                                       std::size_t trials, std::uint64_t seed,
                                       std::size_t calibration_samples = 0);

struct MomentEstimate {
  double mean;
  double std_err;
};

/// Sample mean of p_V(xi) / p_M(xi) over xi ~ N(0, I).
MomentEstimate moment_mc_estimate(const CovarianceMatrix& m, const CovarianceMatrix& v, std::size_t trials,
                                  std::uint64_t seed);

}  // namespace npdetect
