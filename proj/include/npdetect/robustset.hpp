#pragma once

#include <cstddef>
#include <limits>
#include <variant>
#include <vector>

#include "npdetect/matgauss.hpp"

namespace npdetect {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Finite-n reading of the e^{o(n)} slack: either an explicit log budget
/// epsilon, or c * sqrt(n).
struct SlackPolicy {
  struct Explicit {
    double epsilon;
  };
  struct DefaultSqrt {
    double c;
  };
  std::variant<Explicit, DefaultSqrt> kind;

  static SlackPolicy explicit_budget(double epsilon);
  static SlackPolicy default_sqrt(double c = 1.0);

  /// Log budget for dimension n.
  double budget(std::size_t n) const;
};

struct MembershipReport {
  bool pd_guard_ok;
  double log_moment;  // +inf when the guard fails
  double slack_budget;
  bool member;       // guard && log_moment <= slack_budget
  bool core_member;  // guard && log_moment <= 0
};

/// ln f(M, V) where f(M, V) = |M|^{1/2} / |I + V(I - M^-1)|^{1/2} = E_I[p_V / p_M].
/// +inf when I + V^-1 - M^-1 is not positive definite.
double log_lrt_moment(const CovarianceMatrix& m, const CovarianceMatrix& v);
double lrt_moment(const CovarianceMatrix& m, const CovarianceMatrix& v);

/// The symmetric guard matrix I + V^-1 - M^-1.
Eigen::MatrixXd moment_guard_matrix(const CovarianceMatrix& m, const CovarianceMatrix& v);

/// prod lambda_i / sqrt(lambda_i + nu_i (lambda_i - 1)) for commuting M, V with
/// paired eigenvalues; +inf if any bracket is <= 0.
double log_commuting_moment(const std::vector<double>& lambda, const std::vector<double>& nu);
double commuting_moment(const std::vector<double>& lambda, const std::vector<double>& nu);

MembershipReport membership(const CovarianceMatrix& m, const CovarianceMatrix& v, const SlackPolicy& policy);

struct FamilyCheckReport {
  bool all_guards_ok;
  double max_log_moment;
  double slack_budget;
  bool satisfied;
};

/// Can the family be replaced by testing M0 alone?
FamilyCheckReport family_check(const CovarianceMatrix& m0, const std::vector<CovarianceMatrix>& family,
                                      const SlackPolicy& policy);

/// t(S, V) = |I + S + (V - S) S (I + S)^-1| / |I + S| for the signal-plus-noise
/// model; +inf unless I + (I + V)^-1 - (I + S)^-1 is positive definite.
double log_signal_moment(const CovarianceMatrix& s, const CovarianceMatrix& v);
double signal_moment(const CovarianceMatrix& s, const CovarianceMatrix& v);

/// prod [1 + (nu_i - mu_i) mu_i / (1 + mu_i)^2]; +inf if a factor is <= 0.
double log_signal_commuting_moment(const std::vector<double>& mu, const std::vector<double>& nu);
double signal_commuting_moment(const std::vector<double>& mu, const std::vector<double>& nu);

MembershipReport signal_membership(const CovarianceMatrix& s, const CovarianceMatrix& v,
                                   const SlackPolicy& policy);

struct AssumptionValues {
  double divergence_rate;  // (1/n) sum ln x_i + 1/x_i - 1
  double moment_rate;      // (1/n) sum |1/x_i - 1|^(1+delta)
};

struct AssumptionReport {
  std::vector<AssumptionValues> per_matrix;
  double max_divergence_rate;
  double max_moment_rate;
};

/// Finite-n diagnostics over eigenvalues lambda of each covariance matrix.
AssumptionReport check_assumptions(const std::vector<CovarianceMatrix>& family, double delta);

/// Signal-model analog: divergence_rate = (1/n) sum ln(mu+1) + 1/(mu+1) - 1 and
/// moment_rate = (1/n) sum (mu/(mu+1))^(1+delta) over eigenvalues mu of each S.
AssumptionReport check_signal_assumptions(const std::vector<CovarianceMatrix>& family, double delta);

}  // namespace npdetect
