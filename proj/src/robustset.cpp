#include "npdetect/robustset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "npdetect/error.hpp"

namespace npdetect {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    std::ostringstream os;
    os << "dimensions " << a << " and " << b << " differ";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

void require_pairable(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << "eigenvalue lists have lengths " << a.size() << " and " << b.size();
    throw Error(ErrorCode::LengthMismatch, os.str());
  }
  if (a.empty()) throw Error(ErrorCode::LengthMismatch, "empty eigenvalue lists");
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!std::all_of(a.begin(), a.end(), positive) || !std::all_of(b.begin(), b.end(), positive)) {
    throw Error(ErrorCode::BadParameter, "eigenvalues must be positive and finite");
  }
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

CovarianceMatrix shifted_by_identity(const CovarianceMatrix& s) {
  const auto n = static_cast<Eigen::Index>(s.dim());
  return CovarianceMatrix(s.entries() + Eigen::MatrixXd::Identity(n, n));
}

MembershipReport make_report(double log_moment, double budget) {
  MembershipReport r{};
  r.pd_guard_ok = std::isfinite(log_moment);
  r.log_moment = r.pd_guard_ok ? log_moment : kInf;
  r.slack_budget = budget;
  r.member = r.pd_guard_ok && r.log_moment <= budget;
  r.core_member = r.pd_guard_ok && r.log_moment <= 0.0;
  return r;
}

}  // namespace

SlackPolicy SlackPolicy::explicit_budget(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::BadParameter, "slack epsilon must be finite and nonnegative");
  }
  return SlackPolicy{Explicit{epsilon}};
}

SlackPolicy SlackPolicy::default_sqrt(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::BadParameter, "slack constant c must be positive");
  }
  return SlackPolicy{DefaultSqrt{c}};
}

double SlackPolicy::budget(std::size_t n) const {
  if (const auto* e = std::get_if<Explicit>(&kind)) return e->epsilon;
  return std::get<DefaultSqrt>(kind).c * std::sqrt(static_cast<double>(n));
}

Eigen::MatrixXd moment_guard_matrix(const CovarianceMatrix& m, const CovarianceMatrix& v) {
  require_same_dim(m.dim(), v.dim());
  const auto n = static_cast<Eigen::Index>(m.dim());
  return symmetrized(Eigen::MatrixXd::Identity(n, n) + v.inverse() - m.inverse());
}

double log_lrt_moment(const CovarianceMatrix& m, const CovarianceMatrix& v) {
  const Eigen::VectorXd g = symmetric_eigenvalues(moment_guard_matrix(m, v));
  if (!pd_by_eigenvalues(g)) return kInf;
  return 0.5 * (m.log_det() - v.log_det() - g.array().log().sum());
}

double lrt_moment(const CovarianceMatrix& m, const CovarianceMatrix& v) {
  return std::exp(log_lrt_moment(m, v));
}

double log_commuting_moment(const std::vector<double>& lambda, const std::vector<double>& nu) {
  require_pairable(lambda, nu);
  double sum = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double bracket = lambda[i] + nu[i] * (lambda[i] - 1.0);
    if (!(bracket > 0.0)) return kInf;
    sum += std::log(lambda[i]) - 0.5 * std::log(bracket);
  }
  return sum;
}

double commuting_moment(const std::vector<double>& lambda, const std::vector<double>& nu) {
  return std::exp(log_commuting_moment(lambda, nu));
}

MembershipReport membership(const CovarianceMatrix& m, const CovarianceMatrix& v, const SlackPolicy& policy) {
  return make_report(log_lrt_moment(m, v), policy.budget(m.dim()));
}

FamilyCheckReport family_check(const CovarianceMatrix& m0, const std::vector<CovarianceMatrix>& family,
                                      const SlackPolicy& policy) {
  if (family.empty()) throw Error(ErrorCode::EmptyFamily, "family must contain at least one matrix");
  FamilyCheckReport r{};
  r.all_guards_ok = true;
  r.max_log_moment = -kInf;
  for (const auto& v : family) {
    const double lm = log_lrt_moment(m0, v);
    if (!std::isfinite(lm)) r.all_guards_ok = false;
    r.max_log_moment = std::max(r.max_log_moment, lm);
  }
  r.slack_budget = policy.budget(m0.dim());
  r.satisfied = r.all_guards_ok && r.max_log_moment <= r.slack_budget;
  return r;
}

double log_signal_moment(const CovarianceMatrix& s, const CovarianceMatrix& v) {
  require_same_dim(s.dim(), v.dim());
  const auto n = static_cast<Eigen::Index>(s.dim());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const CovarianceMatrix noisy_s = shifted_by_identity(s);
  const CovarianceMatrix noisy_v = shifted_by_identity(v);
  const Eigen::MatrixXd noisy_s_inv = noisy_s.inverse();

  const Eigen::VectorXd g = symmetric_eigenvalues(symmetrized(id + noisy_v.inverse() - noisy_s_inv));
  if (!pd_by_eigenvalues(g)) return kInf;

  // S (I + S)^-1 = I - (I + S)^-1
  const Eigen::MatrixXd numerator = noisy_s.entries() + (v.entries() - s.entries()) * (id - noisy_s_inv);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(numerator);
  const Eigen::MatrixXd& packed = lu.matrixLU();
  double log_abs_det = 0.0;
  double sign = static_cast<double>(lu.permutationP().determinant());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = packed(i, i);
    if (u == 0.0) return kInf;
    if (u < 0.0) sign = -sign;
    log_abs_det += std::log(std::abs(u));
  }
  if (sign < 0.0) return kInf;
  return log_abs_det - noisy_s.log_det();
}

double signal_moment(const CovarianceMatrix& s, const CovarianceMatrix& v) {
  return std::exp(log_signal_moment(s, v));
}

double log_signal_commuting_moment(const std::vector<double>& mu, const std::vector<double>& nu) {
  require_pairable(mu, nu);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double factor = 1.0 + (nu[i] - mu[i]) * mu[i] / ((1.0 + mu[i]) * (1.0 + mu[i]));
    if (!(factor > 0.0)) return kInf;
    sum += std::log(factor);
  }
  return sum;
}

double signal_commuting_moment(const std::vector<double>& mu, const std::vector<double>& nu) {
  return std::exp(log_signal_commuting_moment(mu, nu));
}

MembershipReport signal_membership(const CovarianceMatrix& s, const CovarianceMatrix& v,
                                   const SlackPolicy& policy) {
  return make_report(log_signal_moment(s, v), policy.budget(s.dim()));
}

namespace {

AssumptionReport assumption_report(const std::vector<CovarianceMatrix>& family, double delta, double shift) {
  if (family.empty()) throw Error(ErrorCode::EmptyFamily, "family must contain at least one matrix");
  if (!(delta > 0.0)) throw Error(ErrorCode::BadParameter, "delta must be positive");
  AssumptionReport report{};
  report.max_divergence_rate = -kInf;
  report.max_moment_rate = -kInf;
  for (const auto& m : family) {
    const Eigen::ArrayXd x = m.eigenvalues().array() + shift;
    const double n = static_cast<double>(m.dim());
    AssumptionValues values{};
    values.divergence_rate = (x.log() + x.inverse() - 1.0).sum() / n;
    values.moment_rate = (x.inverse() - 1.0).abs().pow(1.0 + delta).sum() / n;
    report.max_divergence_rate = std::max(report.max_divergence_rate, values.divergence_rate);
    report.max_moment_rate = std::max(report.max_moment_rate, values.moment_rate);
    report.per_matrix.push_back(values);
  }
  return report;
}

}  // namespace

AssumptionReport check_assumptions(const std::vector<CovarianceMatrix>& family, double delta) {
  return assumption_report(family, delta, 0.0);
}

AssumptionReport check_signal_assumptions(const std::vector<CovarianceMatrix>& family, double delta) {
  return assumption_report(family, delta, 1.0);
}

}  // namespace npdetect
