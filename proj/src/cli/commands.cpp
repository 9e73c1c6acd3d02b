#include "npdetect/cli/commands.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "npdetect/bounds.hpp"
#include "npdetect/detector.hpp"
#include "npdetect/divergence.hpp"
#include "npdetect/error.hpp"
#include "npdetect/mcsim.hpp"
#include "npdetect/robustset.hpp"
#include "npdetect/spectral.hpp"

namespace npdetect::cli {

namespace {

constexpr std::uint64_t kDefaultCalibrationSamples = 100'000;

CovarianceMatrix covariance_at(const ConfigNode& root, std::string_view key) {
  return build(parse_covariance(root.child(key)));
}

void require_same_dim(const ConfigNode& root, std::string_view key, std::size_t expected, std::size_t actual) {
  if (expected != actual) {
    throw ConfigError(root.child_path(key), "dimension " + std::to_string(actual) + " does not match " +
                                                std::to_string(expected));
  }
}

double alpha_at(const ConfigNode& root) {
  const double alpha = root.number("alpha");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError(root.child_path("alpha"), "alpha must lie in (0, 1)");
  return alpha;
}

std::size_t count_at(const ConfigNode& root, std::string_view key, std::uint64_t fallback, std::uint64_t minimum) {
  const auto value = root.unsigned_integer_or(key, fallback);
  if (value < minimum) {
    throw ConfigError(root.child_path(key), "must be at least " + std::to_string(minimum));
  }
  return static_cast<std::size_t>(value);
}

SlackPolicy slack_at(const ConfigNode& root) {
  return root.has("slack") ? parse_slack(root.child("slack")) : SlackPolicy::default_sqrt(1.0);
}

Json report_json(const MembershipReport& r) {
  return Json{{"pd_guard_ok", r.pd_guard_ok},
              {"log_moment", number_json(r.log_moment)},
              {"slack_budget", number_json(r.slack_budget)},
              {"member", r.member},
              {"core_member", r.core_member}};
}

Json experiment_json(const ExperimentResult& r) {
  return Json{{"hit_count", r.hit_count},
              {"trials", r.trials},
              {"rate", number_json(r.rate)},
              {"wilson_ci_95", Json::array({number_json(r.ci_lo), number_json(r.ci_hi)})},
              {"log_rate", number_json(r.log_rate)},
              {"log_std_err", number_json(r.log_std_err)},
              {"exponent", number_json(r.exponent)},
              {"seeds", {{"trial_seed", r.seeds.trial_seed}, {"calibration_seed", r.seeds.calibration_seed}}}};
}

void add_rate_rows(CommandOutput& out, const std::string& prefix, const ExperimentResult& r) {
  out.rows.push_back({prefix + "rate", r.rate, r.ci_lo, r.ci_hi});
  out.rows.push_back({prefix + "log_rate", r.log_rate, std::nullopt, std::nullopt});
  out.rows.push_back({prefix + "exponent", r.exponent, std::nullopt, std::nullopt});
}

double flag(bool b) { return b ? 1.0 : 0.0; }

CommandOutput cmd_kl(const ConfigNode& root) {
  root.allow_only({"M", "V"});
  const CovarianceMatrix m = covariance_at(root, "M");
  CommandOutput out;
  out.n = m.dim();
  const double d = kl_identity(m);
  out.result = {{"command", "kl"}, {"n", m.dim()}, {"kl_identity", number_json(d)}};
  out.rows.push_back({"kl_identity", d, std::nullopt, std::nullopt});
  if (root.has("V")) {
    const CovarianceMatrix v = covariance_at(root, "V");
    require_same_dim(root, "V", m.dim(), v.dim());
    const double dv = kl_general(v, m);
    out.result["kl_general"] = number_json(dv);
    out.rows.push_back({"kl_general", dv, std::nullopt, std::nullopt});
  }
  return out;
}

CommandOutput cmd_membership(const ConfigNode& root) {
  root.allow_only({"model", "M", "S", "V", "slack"});
  const std::string model = root.string_or("model", "covariance");
  if (model != "covariance" && model != "signal") {
    throw ConfigError(root.child_path("model"), "model must be 'covariance' or 'signal'");
  }
  const std::string_view base_key = model == "covariance" ? "M" : "S";
  const CovarianceMatrix base = covariance_at(root, base_key);
  const CovarianceMatrix v = covariance_at(root, "V");
  require_same_dim(root, "V", base.dim(), v.dim());
  const SlackPolicy policy = slack_at(root);
  const MembershipReport r =
      model == "covariance" ? membership(base, v, policy) : signal_membership(base, v, policy);

  CommandOutput out;
  out.n = base.dim();
  out.result = report_json(r);
  out.result["command"] = "membership";
  out.result["model"] = model;
  out.result["n"] = base.dim();
  out.rows = {{"log_moment", r.log_moment, std::nullopt, std::nullopt},
              {"slack_budget", r.slack_budget, std::nullopt, std::nullopt},
              {"member", flag(r.member), std::nullopt, std::nullopt},
              {"core_member", flag(r.core_member), std::nullopt, std::nullopt}};
  return out;
}

CommandOutput cmd_bounds(const ConfigNode& root) {
  root.allow_only({"M", "alpha", "mc_samples", "seed", "p"});
  const CovarianceMatrix m = covariance_at(root, "M");
  const double alpha = alpha_at(root);
  const auto samples = count_at(root, "mc_samples", kDefaultCalibrationSamples, kMinCalibrationSamples);
  const auto seed = root.unsigned_integer_or("seed", 0);
  const double p = root.number_or("p", 2.0);
  if (!(p > 1.0 && p <= 2.0)) throw ConfigError(root.child_path("p"), "p must lie in (1, 2]");

  const Detector det = calibrate(m, alpha, samples, seed);
  const SteinBounds b = stein_bounds(m, alpha, det.mu0);
  const double cp = cp_constant(m, p);
  const double mu0_bound = mu0_upper_bound(m, alpha, p);

  CommandOutput out;
  out.n = m.dim();
  out.alpha = alpha;
  out.seed = seed;
  out.result = {{"command", "bounds"},       {"n", m.dim()},
                {"alpha", alpha},            {"d", number_json(b.d)},
                {"h_alpha", number_json(b.h_alpha)}, {"gamma", number_json(det.gamma)},
                {"mu0", number_json(b.mu0)}, {"lower_log_beta", number_json(b.lower_log_beta)},
                {"upper_log_beta", number_json(b.upper_log_beta)}, {"p", p},
                {"cp", number_json(cp)},     {"mu0_upper_bound", number_json(mu0_bound)},
                {"mc_samples", samples},     {"seed", seed}};
  out.rows = {{"d", b.d, std::nullopt, std::nullopt},
              {"h_alpha", b.h_alpha, std::nullopt, std::nullopt},
              {"mu0", b.mu0, std::nullopt, std::nullopt},
              {"lower_log_beta", b.lower_log_beta, std::nullopt, std::nullopt},
              {"upper_log_beta", b.upper_log_beta, std::nullopt, std::nullopt},
              {"cp", cp, std::nullopt, std::nullopt},
              {"mu0_upper_bound", mu0_bound, std::nullopt, std::nullopt}};
  return out;
}

CommandOutput cmd_detect(const ConfigNode& root) {
  root.allow_only({"M", "alpha", "mc_samples", "seed", "observations"});
  const CovarianceMatrix m = covariance_at(root, "M");
  const double alpha = alpha_at(root);
  const auto samples = count_at(root, "mc_samples", kDefaultCalibrationSamples, kMinCalibrationSamples);
  const auto seed = root.unsigned_integer_or("seed", 0);

  std::vector<Eigen::VectorXd> observations;
  if (root.has("observations")) {
    const std::string path = root.child_path("observations");
    const Json& obs = root.at("observations");
    if (!obs.is_array()) throw ConfigError(path, "expected array of observation vectors");
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const std::string row_path = path + "/" + std::to_string(k);
      if (!obs[k].is_array()) throw ConfigError(row_path, "expected array of numbers");
      if (obs[k].size() != m.dim()) {
        throw ConfigError(row_path, "length " + std::to_string(obs[k].size()) + " does not match n = " +
                                        std::to_string(m.dim()));
      }
      Eigen::VectorXd y(static_cast<Eigen::Index>(m.dim()));
      for (std::size_t i = 0; i < m.dim(); ++i) {
        if (!obs[k][i].is_number()) throw ConfigError(row_path + "/" + std::to_string(i), "expected number");
        y(static_cast<Eigen::Index>(i)) = obs[k][i].get<double>();
      }
      observations.push_back(std::move(y));
    }
  }

  const Detector det = calibrate(m, alpha, samples, seed);
  CommandOutput out;
  out.n = m.dim();
  out.alpha = alpha;
  out.seed = seed;
  Json decisions = Json::array();
  for (const auto& y : observations) {
    const double llr = log_likelihood_ratio(m, y).value;
    decisions.push_back({{"llr", number_json(llr)}, {"decision", to_string(decide(det, y))}});
  }
  out.result = {{"command", "detect"},
                {"n", m.dim()},
                {"alpha", alpha},
                {"gamma", number_json(det.gamma)},
                {"mu0", number_json(det.mu0)},
                {"kl_identity", number_json(kl_identity(m))},
                {"mc_samples", samples},
                {"seed", seed},
                {"decisions", decisions}};
  out.rows = {{"gamma", det.gamma, std::nullopt, std::nullopt}, {"mu0", det.mu0, std::nullopt, std::nullopt}};
  return out;
}

CommandOutput cmd_simulate(const ConfigNode& root) {
  root.allow_only({"experiment", "M", "V", "alpha", "calibration_samples", "calibration_seed", "trials", "seed"});
  const std::string experiment = root.string("experiment");
  if (experiment != "false_alarm" && experiment != "miss" && experiment != "robustness" && experiment != "moment") {
    throw ConfigError(root.child_path("experiment"),
                      "experiment must be one of false_alarm, miss, robustness, moment");
  }
  const CovarianceMatrix m = covariance_at(root, "M");
  const auto trials = count_at(root, "trials", 0, kMinTrials);
  const auto seed = root.unsigned_integer_or("seed", 0);

  CommandOutput out;
  out.n = m.dim();
  out.seed = seed;
  out.result = {{"command", "simulate"}, {"experiment", experiment}, {"n", m.dim()}, {"trials", trials},
                {"seed", seed}};

  std::optional<CovarianceMatrix> v;
  if (experiment != "false_alarm") {
    v.emplace(covariance_at(root, "V"));
    require_same_dim(root, "V", m.dim(), v->dim());
  }

  if (experiment == "moment") {
    const MomentEstimate est = moment_mc_estimate(m, *v, trials, seed);
    const double closed = lrt_moment(m, *v);
    out.result["mean"] = number_json(est.mean);
    out.result["std_err"] = number_json(est.std_err);
    out.result["lrt_moment"] = number_json(closed);
    out.rows = {{"moment_mean", est.mean, est.mean - 3.0 * est.std_err, est.mean + 3.0 * est.std_err},
                {"lrt_moment", closed, std::nullopt, std::nullopt}};
    return out;
  }

  const double alpha = alpha_at(root);
  out.alpha = alpha;
  out.result["alpha"] = alpha;
  const auto cal_samples = count_at(root, "calibration_samples", kDefaultCalibrationSamples, kMinCalibrationSamples);
  const auto cal_seed = root.unsigned_integer_or("calibration_seed", seed);
  out.result["calibration_samples"] = cal_samples;
  out.result["calibration_seed"] = cal_seed;

  if (experiment == "robustness") {
    // The robustness chain uses one seed for calibration and both miss runs.
    const RobustnessResult r = robustness_experiment(m, *v, alpha, trials, seed, cal_samples);
    out.result["log_beta_M"] = number_json(r.log_beta_m);
    out.result["log_beta_V"] = number_json(r.log_beta_v);
    out.result["log_moment"] = number_json(r.log_moment);
    out.result["mu0"] = number_json(r.mu0);
    out.result["budget"] = number_json(r.budget);
    out.result["sigma"] = number_json(r.sigma);
    out.result["holds"] = r.holds;
    out.result["miss_M"] = experiment_json(r.miss_m);
    out.result["miss_V"] = experiment_json(r.miss_v);
    add_rate_rows(out, "miss_M_", r.miss_m);
    add_rate_rows(out, "miss_V_", r.miss_v);
    out.rows.push_back({"budget", r.budget, std::nullopt, std::nullopt});
    out.rows.push_back({"holds", flag(r.holds), std::nullopt, std::nullopt});
    return out;
  }

  const Detector det = calibrate(m, alpha, cal_samples, cal_seed);
  out.result["gamma"] = number_json(det.gamma);
  out.result["mu0"] = number_json(det.mu0);
  const ExperimentResult r =
      experiment == "false_alarm" ? estimate_false_alarm(det, trials, seed) : estimate_miss(det, *v, trials, seed);
  out.result["result"] = experiment_json(r);
  add_rate_rows(out, experiment == "false_alarm" ? "false_alarm_" : "miss_", r);
  return out;
}

CommandOutput cmd_spectral(const ConfigNode& root) {
  root.allow_only({"fS", "fK", "tol", "grid_points", "delta", "szego_n"});
  const SpectralDensity fs = parse_density(root.child("fS"));
  const SpectralDensity fk = parse_density(root.child("fK"));
  const double tol = root.number_or("tol", 0.0);
  if (!(tol >= 0.0)) throw ConfigError(root.child_path("tol"), "tol must be nonnegative");
  const auto grid = root.unsigned_integer_or("grid_points", kDefaultGridPoints);
  if (grid < 64 || grid % 2 != 0 || grid > (1u << 24)) {
    throw ConfigError(root.child_path("grid_points"), "grid_points must be even and in [64, 2^24]");
  }
  const double delta = root.number_or("delta", 1.0);
  if (!(delta > 0.0)) throw ConfigError(root.child_path("delta"), "delta must be positive");

  const double functional = spectral_functional(fs, fk, grid);
  const SpectralAssumptions a = spectral_assumptions(fk, delta, grid);
  CommandOutput out;
  out.result = {{"command", "spectral"},
                {"functional", number_json(functional)},
                {"member", functional <= tol},
                {"tol", tol},
                {"grid_points", grid},
                {"delta", delta},
                {"assumptions", {{"divergence_integral", number_json(a.divergence_integral)}, {"moment_integral", number_json(a.moment_integral)}}}};
  out.rows = {{"functional", functional, std::nullopt, std::nullopt},
              {"member", flag(functional <= tol), std::nullopt, std::nullopt},
              {"divergence_integral", a.divergence_integral, std::nullopt, std::nullopt},
              {"moment_integral", a.moment_integral, std::nullopt, std::nullopt}};
  if (root.has("szego_n")) {
    const auto n = root.unsigned_integer("szego_n");
    if (n < 2 || n > 4096) throw ConfigError(root.child_path("szego_n"), "szego_n must lie in [2, 4096]");
    const SzegoRates rates = szego_log_det_rate(fs, static_cast<std::size_t>(n), grid);
    out.n = static_cast<std::size_t>(n);
    out.result["szego"] = {{"n", n},
                           {"matrix_rate", number_json(rates.matrix_rate)},
                           {"spectral_rate", number_json(rates.spectral_rate)}};
    out.rows.push_back({"szego_matrix_rate", rates.matrix_rate, std::nullopt, std::nullopt});
    out.rows.push_back({"szego_spectral_rate", rates.spectral_rate, std::nullopt, std::nullopt});
  }
  return out;
}

CommandOutput cmd_inverse(const ConfigNode& root) {
  root.allow_only({"M0", "family", "slack", "delta"});
  const CovarianceMatrix m0 = covariance_at(root, "M0");
  const std::string family_path = root.child_path("family");
  const Json& family_json = root.at("family");
  if (!family_json.is_array()) throw ConfigError(family_path, "expected array of covariance specs");
  if (family_json.empty()) throw ConfigError(family_path, "family must not be empty");
  std::vector<CovarianceMatrix> family;
  for (std::size_t k = 0; k < family_json.size(); ++k) {
    const std::string member_path = family_path + "/" + std::to_string(k);
    family.push_back(build(parse_covariance(ConfigNode(family_json[k], member_path))));
    if (family.back().dim() != m0.dim()) {
      throw ConfigError(member_path, "dimension does not match M0");
    }
  }
  const double delta = root.number_or("delta", 1.0);
  if (!(delta > 0.0)) throw ConfigError(root.child_path("delta"), "delta must be positive");

  const FamilyCheckReport r = family_check(m0, family, slack_at(root));
  const AssumptionReport a = check_assumptions(family, delta);
  Json per_matrix = Json::array();
  for (const auto& v : a.per_matrix) {
    per_matrix.push_back({{"divergence_rate", number_json(v.divergence_rate)}, {"moment_rate", number_json(v.moment_rate)}});
  }
  CommandOutput out;
  out.n = m0.dim();
  out.result = {{"command", "inverse"},
                {"n", m0.dim()},
                {"family_size", family.size()},
                {"all_guards_ok", r.all_guards_ok},
                {"max_log_moment", number_json(r.max_log_moment)},
                {"slack_budget", number_json(r.slack_budget)},
                {"satisfied", r.satisfied},
                {"assumptions",
                 {{"delta", delta},
                  {"max_divergence_rate", number_json(a.max_divergence_rate)},
                  {"max_moment_rate", number_json(a.max_moment_rate)},
                  {"per_matrix", per_matrix}}}};
  out.rows = {{"max_log_moment", r.max_log_moment, std::nullopt, std::nullopt},
              {"slack_budget", r.slack_budget, std::nullopt, std::nullopt},
              {"satisfied", flag(r.satisfied), std::nullopt, std::nullopt},
              {"max_divergence_rate", a.max_divergence_rate, std::nullopt, std::nullopt},
              {"max_moment_rate", a.max_moment_rate, std::nullopt, std::nullopt}};
  return out;
}

using Handler = std::function<CommandOutput(const ConfigNode&)>;

const std::map<std::string, Handler, std::less<>>& handlers() {
  static const std::map<std::string, Handler, std::less<>> table{
      {"kl", cmd_kl},         {"membership", cmd_membership}, {"bounds", cmd_bounds},   {"detect", cmd_detect},
      {"simulate", cmd_simulate}, {"spectral", cmd_spectral}, {"inverse", cmd_inverse},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"kl", "membership", "bounds", "detect", "simulate", "spectral", "inverse"};
  return names;
}

CommandOutput run_command(std::string_view command, const Json& config) {
  const auto& table = handlers();
  const auto it = table.find(command);
  if (it == table.end()) throw ConfigError("", "unknown command '" + std::string(command) + "'");
  return it->second(ConfigNode(config, ""));
}

Json number_json(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

}  // namespace npdetect::cli
