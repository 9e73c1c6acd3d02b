#include "npdetect/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "npdetect/error.hpp"
#include "npdetect/robustset.hpp"

namespace npdetect {

namespace {

constexpr double kPi = std::numbers::pi;

void require_grid(std::size_t intervals, std::size_t minimum) {
  if (intervals < minimum || intervals % 2 != 0) {
    std::ostringstream os;
    os << "grid_points = " << intervals << " must be even and >= " << minimum;
    throw Error(ErrorCode::BadParameter, os.str());
  }
}

double node(std::size_t j, std::size_t intervals) {
  return -kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(intervals);
}

double simpson_weight(std::size_t j, std::size_t intervals) {
  if (j == 0 || j == intervals) return 1.0;
  return j % 2 == 1 ? 4.0 : 2.0;
}

}  // namespace

SpectralDensity SpectralDensity::ar1(double a) {
  if (!(a >= 0.0 && a <= kMaxAr1)) {
    std::ostringstream os;
    os << "ar1 parameter a = " << a << " outside [0, " << kMaxAr1 << "]";
    throw Error(ErrorCode::BadParameter, os.str());
  }
  return SpectralDensity(Ar1{a});
}

SpectralDensity SpectralDensity::grid(std::vector<double> values) {
  if (values.size() < 3) {
    throw Error(ErrorCode::BadParameter, "grid density needs at least 3 nodes");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::BadParameter, "grid density values must be finite and nonnegative");
    }
  }
  const std::size_t last = values.size() - 1;
  for (std::size_t j = 0; j <= last / 2; ++j) {
    if (std::abs(values[j] - values[last - j]) > 1e-9) {
      std::ostringstream os;
      os << "grid density is not symmetric: node " << j << " vs node " << last - j;
      throw Error(ErrorCode::BadParameter, os.str());
    }
  }
  return SpectralDensity(Grid{std::move(values)});
}

double SpectralDensity::operator()(double omega) const {
  if (const auto* p = std::get_if<Ar1>(&rep_)) {
    const double a = p->a;
    return (1.0 - a * a) / (1.0 - 2.0 * a * std::cos(omega) + a * a);
  }
  const auto& values = std::get<Grid>(rep_).values;
  const double last = static_cast<double>(values.size() - 1);
  const double pos = std::clamp((omega + kPi) / (2.0 * kPi) * last, 0.0, last);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

SpectralDensity constant_density(double value, std::size_t nodes) {
  return SpectralDensity::grid(std::vector<double>(nodes, value));
}

SpectralDensity ar1_spectrum(double a) { return SpectralDensity::ar1(a); }

double simpson(const std::function<double(double)>& integrand, std::size_t intervals) {
  require_grid(intervals, 2);
  double sum = 0.0;
  for (std::size_t j = 0; j <= intervals; ++j) {
    sum += simpson_weight(j, intervals) * integrand(node(j, intervals));
  }
  const double h = 2.0 * kPi / static_cast<double>(intervals);
  return sum * h / 3.0;
}

double spectral_functional(const SpectralDensity& fs, const SpectralDensity& fk,
                           std::size_t grid_points) {
  require_grid(grid_points, 64);
  double sum = 0.0;
  for (std::size_t j = 0; j <= grid_points; ++j) {
    const double w = node(j, grid_points);
    const double s = fs(w);
    const double bracket = 1.0 + s * (fk(w) - s) / ((1.0 + s) * (1.0 + s));
    if (!(bracket > 0.0)) throw IntegrandNonpositiveError(w, bracket);
    sum += simpson_weight(j, grid_points) * std::log(bracket);
  }
  const double h = 2.0 * kPi / static_cast<double>(grid_points);
  return sum * h / 3.0;
}

bool spectral_membership(const SpectralDensity& fs, const SpectralDensity& fk, double tol,
                         std::size_t grid_points) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::BadParameter, "tol must be nonnegative");
  return spectral_functional(fs, fk, grid_points) <= tol;
}

CovarianceMatrix toeplitz_from_spectrum(const SpectralDensity& f, std::size_t n,
                                        std::size_t grid_points) {
  require_grid(grid_points, 64);
  if (n == 0) throw Error(ErrorCode::BadParameter, "dimension must be positive");
  std::vector<double> weighted(grid_points + 1);
  std::vector<double> omega(grid_points + 1);
  const double h = 2.0 * kPi / static_cast<double>(grid_points);
  for (std::size_t j = 0; j <= grid_points; ++j) {
    omega[j] = node(j, grid_points);
    weighted[j] = simpson_weight(j, grid_points) * f(omega[j]) * h / (3.0 * 2.0 * kPi);
  }
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j <= grid_points; ++j) {
      sum += weighted[j] * std::cos(static_cast<double>(k) * omega[j]);
    }
    r[k] = sum;
  }
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd t(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      t(i, j) = r[static_cast<std::size_t>(std::abs(i - j))];
    }
  }
  return CovarianceMatrix(std::move(t));
}

SzegoRates szego_log_det_rate(const SpectralDensity& f, std::size_t n, std::size_t grid_points) {
  if (n < 2) throw Error(ErrorCode::BadParameter, "szego rate needs n >= 2");
  const CovarianceMatrix t = toeplitz_from_spectrum(f, n, grid_points);
  SzegoRates rates{};
  rates.matrix_rate = t.log_det() / static_cast<double>(n);
  rates.spectral_rate = simpson(
      [&](double w) {
        const double v = f(w);
        if (!(v > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "ln f undefined where f = 0");
        return std::log(v);
      },
      grid_points) / (2.0 * kPi);
  return rates;
}

SpectralAssumptions spectral_assumptions(const SpectralDensity& fk, double delta,
                                         std::size_t grid_points) {
  if (!(delta > 0.0)) throw Error(ErrorCode::BadParameter, "delta must be positive");
  require_grid(grid_points, 64);
  SpectralAssumptions out{};
  out.divergence_integral = simpson(
      [&](double w) {
        const double v = fk(w) + 1.0;
        return std::log(v) + 1.0 / v - 1.0;
      },
      grid_points);
  out.moment_integral = simpson(
      [&](double w) {
        const double v = fk(w);
        return std::pow(std::abs(v / (v + 1.0)), 1.0 + delta);
      },
      grid_points);
  return out;
}

std::vector<double> fourier_frequencies(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = kPi * static_cast<double>(j + 1) / static_cast<double>(n + 1);
  }
  return w;
}

double sampled_signal_log_rate(const SpectralDensity& fs, const SpectralDensity& fk, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadParameter, "dimension must be positive");
  const auto freqs = fourier_frequencies(n);
  std::vector<double> mu(n);
  std::vector<double> nu(n);
  for (std::size_t j = 0; j < n; ++j) {
    mu[j] = fs(freqs[j]);
    nu[j] = fk(freqs[j]);
  }
  return log_signal_commuting_moment(mu, nu) / static_cast<double>(n);
}

}  // namespace npdetect
