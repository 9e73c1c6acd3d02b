#pragma once

#include <cstddef>
#include <functional>

#include "npdetect/matgauss.hpp"
#include "npdetect/spectral_density.hpp"

namespace npdetect {

inline constexpr std::size_t kDefaultGridPoints = 4096;

SpectralDensity ar1_spectrum(double a);

/// Composite Simpson over [-pi, pi] with `intervals` subintervals (even, >= 2).
double simpson(const std::function<double(double)>& integrand, std::size_t intervals);

/// Integral over [-pi, pi] of ln[1 + fS (fK - fS) / (1 + fS)^2].
///
/// `grid_points` is the number of Simpson subintervals (even, >= 64). Throws
/// IntegrandNonpositiveError naming the first node where the bracket is <= 0.
double spectral_functional(const SpectralDensity& fs, const SpectralDensity& fk,
                           std::size_t grid_points = kDefaultGridPoints);

/// spectral_functional(fs, fk) <= tol.
bool spectral_membership(const SpectralDensity& fs, const SpectralDensity& fk, double tol,
                         std::size_t grid_points = kDefaultGridPoints);

/// Toeplitz matrix with r_k = (1/2pi) * integral f(w) cos(kw) dw.
CovarianceMatrix toeplitz_from_spectrum(const SpectralDensity& f, std::size_t n,
                                        std::size_t grid_points = kDefaultGridPoints);

struct SzegoRates {
  double matrix_rate;    // (1/n) sum ln lambda_i(T_n(f))
  double spectral_rate;  // (1/2pi) integral ln f
};

SzegoRates szego_log_det_rate(const SpectralDensity& f, std::size_t n,
                              std::size_t grid_points = kDefaultGridPoints);

struct SpectralAssumptions {
  double divergence_integral;  // integral ln(fK+1) + 1/(fK+1) - 1
  double moment_integral;      // integral |fK/(fK+1)|^(1+delta)
};

SpectralAssumptions spectral_assumptions(const SpectralDensity& fk, double delta,
                                         std::size_t grid_points = kDefaultGridPoints);

/// Frequencies w_j = pi j / (n + 1), j = 1..n, at which the symmetric Toeplitz
/// commuting family is diagonal.
std::vector<double> fourier_frequencies(std::size_t n);

/// (1/n) ln t(S, V) for commuting S, V whose spectra are fS and fK sampled at
/// fourier_frequencies(n). Tends to spectral_functional / (2 pi).
double sampled_signal_log_rate(const SpectralDensity& fs, const SpectralDensity& fk, std::size_t n);

}  // namespace npdetect
