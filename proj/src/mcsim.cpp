#include "npdetect/mcsim.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "npdetect/error.hpp"
#include "npdetect/parallel.hpp"
#include "npdetect/robustset.hpp"
#include "npdetect/rng.hpp"

namespace npdetect {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.carry_);
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

void require_trials(std::size_t trials) {
  if (trials < kMinTrials) {
    std::ostringstream os;
    os << "trials = " << trials << " below minimum " << kMinTrials;
    throw Error(ErrorCode::BadParameter, os.str());
  }
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    std::ostringstream os;
    os << "dimensions " << a << " and " << b << " differ";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

// Counts trials whose statistic f_M(y), y = factor_in_m_basis * z, lands on
// the H0 side of the threshold.
std::size_t count_accepts(const Detector& det, const Eigen::MatrixXd& factor_in_m_basis, std::size_t trials,
                          std::uint64_t seed, StreamTag tag) {
  const Eigen::VectorXd weight = det.m.eigenvalues().array().inverse() - 1.0;
  const double log_det = det.m.log_det();
  const auto n = weight.size();
  std::vector<std::size_t> per_chunk(chunk_count(trials), 0);
  for_each_chunk(trials, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Eigen::VectorXd z(n);
    Eigen::VectorXd w(n);
    std::size_t accepted = 0;
    for (std::size_t t = begin; t < end; ++t) {
      auto gen = substream(seed, tag, t);
      std::normal_distribution<double> normal;
      for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(gen);
      w.noalias() = factor_in_m_basis * z;
      const double llr = 0.5 * (log_det + weight.dot(w.cwiseAbs2()));
      if (llr >= det.gamma) ++accepted;
    }
    per_chunk[chunk] = accepted;
  });
  std::size_t total = 0;
  for (auto c : per_chunk) total += c;
  return total;
}

ExperimentResult make_result(std::size_t hits, std::size_t trials, std::size_t n, Provenance seeds) {
  ExperimentResult r{};
  r.hit_count = hits;
  r.trials = trials;
  r.n = n;
  r.rate = static_cast<double>(hits) / static_cast<double>(trials);
  const Interval ci = wilson_interval(hits, trials);
  r.ci_lo = std::min(ci.lo, r.rate);
  r.ci_hi = std::max(ci.hi, r.rate);
  if (hits == 0) {
    r.log_rate = -kInf;
    r.log_std_err = kInf;
    r.exponent = kInf;
  } else {
    r.log_rate = std::log(r.rate);
    r.log_std_err = std::sqrt((1.0 - r.rate) / (static_cast<double>(trials) * r.rate));
    r.exponent = -r.log_rate / static_cast<double>(n);
  }
  r.seeds = seeds;
  return r;
}

}  // namespace

Interval wilson_interval(std::size_t hits, std::size_t trials, double z) {
  if (trials == 0) throw Error(ErrorCode::BadParameter, "wilson interval needs trials > 0");
  const double n = static_cast<double>(trials);
  if (hits == 0) return {0.0, std::min(1.0, 3.0 / n)};
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ExperimentResult estimate_false_alarm(const Detector& det, std::size_t trials, std::uint64_t seed) {
  require_trials(trials);
  const Eigen::MatrixXd factor = det.m.eigenvectors().transpose();
  const std::size_t accepted = count_accepts(det, factor, trials, seed, StreamTag::FalseAlarm);
  return make_result(trials - accepted, trials, det.m.dim(), {seed, det.calibration.seed});
}

ExperimentResult estimate_miss(const Detector& det, const CovarianceMatrix& v, std::size_t trials,
                               std::uint64_t seed) {
  require_trials(trials);
  require_same_dim(det.m.dim(), v.dim());
  const Eigen::MatrixXd factor = det.m.eigenvectors().transpose() * v.sqrt_factor();
  const std::size_t accepted = count_accepts(det, factor, trials, seed, StreamTag::Miss);
  return make_result(accepted, trials, det.m.dim(), {seed, det.calibration.seed});
}

Detector calibrate(const DetectorSettings& settings) {
  return calibrate(build(settings.m), settings.alpha, settings.calibration_samples, settings.calibration_seed);
}

ExperimentResult estimate_false_alarm(const ExperimentConfig& cfg) {
  return estimate_false_alarm(calibrate(cfg.detector), cfg.trials, cfg.seed);
}

ExperimentResult estimate_miss(const ExperimentConfig& cfg, const CovarianceMatrix& v) {
  return estimate_miss(calibrate(cfg.detector), v, cfg.trials, cfg.seed);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (!cfg.truth) return estimate_false_alarm(cfg);
  return estimate_miss(cfg, build(*cfg.truth));
}

RobustnessResult robustness_experiment(const CovarianceMatrix& m, const CovarianceMatrix& v, double alpha,
                                       std::size_t trials, std::uint64_t seed,
                                       std::size_t calibration_samples) {
  require_same_dim(m.dim(), v.dim());
  const double log_moment = log_lrt_moment(m, v);
  if (!std::isfinite(log_moment)) {
    throw Error(ErrorCode::MomentInfinite, "I + V^-1 - M^-1 is not positive definite");
  }
  if (calibration_samples == 0) calibration_samples = std::max(trials, kMinCalibrationSamples);
  const Detector det = calibrate(m, alpha, calibration_samples, seed);

  RobustnessResult r{};
  r.miss_m = estimate_miss(det, m, trials, seed);
  r.miss_v = estimate_miss(det, v, trials, seed);
  r.log_beta_m = r.miss_m.log_rate;
  r.log_beta_v = r.miss_v.log_rate;
  r.log_moment = log_moment;
  r.mu0 = det.mu0;
  r.budget = log_moment + 2.0 * det.mu0;
  r.sigma = std::hypot(r.miss_m.log_std_err, r.miss_v.log_std_err);
  if (r.miss_v.hit_count == 0) {
    r.holds = true;
  } else {
    r.holds = r.log_beta_v <= r.log_beta_m + r.budget + 3.0 * r.sigma;
  }
  return r;
}

MomentEstimate moment_mc_estimate(const CovarianceMatrix& m, const CovarianceMatrix& v, std::size_t trials,
                                  std::uint64_t seed) {
  require_same_dim(m.dim(), v.dim());
  if (trials < 2) throw Error(ErrorCode::BadParameter, "moment estimate needs at least 2 trials");
  const Eigen::MatrixXd a = m.inverse() - v.inverse();
  const double offset = 0.5 * (m.log_det() - v.log_det());
  const auto n = static_cast<Eigen::Index>(m.dim());

  struct Partial {
    CompensatedSum sum;
    CompensatedSum sum_sq;
  };
  std::vector<Partial> partials(chunk_count(trials));
  for_each_chunk(trials, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Eigen::VectorXd xi(n);
    Partial p;
    for (std::size_t t = begin; t < end; ++t) {
      auto gen = substream(seed, StreamTag::Moment, t);
      std::normal_distribution<double> normal;
      for (Eigen::Index i = 0; i < n; ++i) xi(i) = normal(gen);
      const double ratio = std::exp(offset + 0.5 * xi.dot(a * xi));
      p.sum.add(ratio);
      p.sum_sq.add(ratio * ratio);
    }
    partials[chunk] = p;
  });
  CompensatedSum sum;
  CompensatedSum sum_sq;
  for (const auto& p : partials) {
    sum.add(p.sum);
    sum_sq.add(p.sum_sq);
  }
  const double count = static_cast<double>(trials);
  const double mean = sum.value() / count;
  const double var = std::max(0.0, (sum_sq.value() - count * mean * mean) / (count - 1.0));
  return {mean, std::sqrt(var / count)};
}

}  // namespace npdetect
