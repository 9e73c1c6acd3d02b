#pragma once

#include <variant>
#include <vector>

namespace npdetect {

/// Power spectral density on [-pi, pi].
///
/// Two representations are supported: the closed-form AR(1) (Poisson kernel)
/// density (1 - a^2) / (1 - 2a cos w + a^2), and a table of values on a uniform
/// closed grid over [-pi, pi] that is linearly interpolated between nodes.
class SpectralDensity {
 public:
  struct Ar1 {
    double a;
  };
  struct Grid {
    std::vector<double> values;
  };

  /// Throws BadParameter unless 0 <= a <= 0.999.
  static SpectralDensity ar1(double a);
  /// Throws BadParameter for fewer than 3 nodes, negative or non-finite values,
  /// or asymmetry |f(w) - f(-w)| > 1e-9.
  static SpectralDensity grid(std::vector<double> values);

  double operator()(double omega) const;

  bool is_ar1() const noexcept { return std::holds_alternative<Ar1>(rep_); }
  const std::variant<Ar1, Grid>& representation() const noexcept { return rep_; }

 private:
  explicit SpectralDensity(std::variant<Ar1, Grid> rep) : rep_(std::move(rep)) {}

  std::variant<Ar1, Grid> rep_;
};

/// Constant density sampled on `nodes` grid points.
SpectralDensity constant_density(double value, std::size_t nodes = 65);

}  // namespace npdetect
