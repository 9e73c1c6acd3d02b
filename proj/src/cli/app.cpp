#include "npdetect/cli/app.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "npdetect/cli/commands.hpp"
#include "npdetect/cli/config.hpp"
#include "npdetect/error.hpp"

namespace npdetect::cli {

namespace {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_rows(const std::string& command, const std::string& hash, const CommandOutput& output) {
  std::ostringstream os;
  for (const auto& row : output.rows) {
    os << command << ',' << hash << ',' << output.n << ',' << (output.alpha ? format_number(*output.alpha) : "")
       << ',' << row.metric << ',' << format_number(row.value) << ','
       << (row.ci_lo ? format_number(*row.ci_lo) : "") << ',' << (row.ci_hi ? format_number(*row.ci_hi) : "")
       << ',' << (output.seed ? std::to_string(*output.seed) : "") << '\n';
  }
  return os.str();
}

void print_table(const CommandOutput& output, std::ostream& err) {
  for (const auto& row : output.rows) {
    err << "  " << row.metric;
    for (std::size_t pad = row.metric.size(); pad < 24; ++pad) err << ' ';
    err << format_number(row.value);
    if (row.ci_lo && row.ci_hi) err << "  [" << format_number(*row.ci_lo) << ", " << format_number(*row.ci_hi) << ']';
    err << '\n';
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool command_takes_seed(const std::string& command) {
  return command == "bounds" || command == "detect" || command == "simulate";
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

void write_outputs(const fs::path& dir, const std::string& command, const std::string& config_path,
                   const Json& config, const std::string& hash, const std::string& json_text,
                   const std::string& csv_text) {
  fs::create_directories(dir);
  const fs::path json_path = dir / (command + ".json");
  const fs::path csv_path = dir / (command + ".csv");
  const fs::path manifest_path = dir / (command + ".manifest.json");
  {
    std::ofstream f(json_path, std::ios::trunc);
    f << json_text << '\n';
  }
  {
    const bool fresh = !fs::exists(csv_path) || fs::file_size(csv_path) == 0;
    std::ofstream f(csv_path, std::ios::app);
    if (fresh) f << csv_header() << '\n';
    f << csv_text;
  }
  const Json manifest{{"command", command},
                      {"config_path", config_path},
                      {"config_hash", hash},
                      {"config", config},
                      {"tool_version", kToolVersion},
                      {"timestamp", utc_timestamp()},
                      {"outputs", Json::array({json_path.string(), csv_path.string()})}};
  std::ofstream f(manifest_path, std::ios::trunc);
  f << manifest.dump(2) << '\n';
}

}  // namespace

const char* csv_header() noexcept { return "command,config_hash,n,alpha,metric,value,ci_lo,ci_hi,seed"; }

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Likelihood-ratio detection of covariance changes in Gaussian vectors", "npdetect"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "json";
  std::string config_path;
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", out_dir, "Directory for JSON, CSV and manifest outputs");
  app.add_option("--format", format, "Stdout format")->check(CLI::IsMember({"json", "csv"}));

  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " command");
    sub->fallthrough();
    sub->add_option("config", config_path, "Config JSON file")->required();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Json config = load_config(config_path);
    if (!config.is_object()) throw ConfigError("", "config must be a JSON object");
    if (seed && command_takes_seed(command)) config["seed"] = *seed;
    const std::string hash = config_hash(config);

    const CommandOutput output = run_command(command, config);
    const std::string json_text = output.result.dump(2);
    const std::string csv_text = csv_rows(command, hash, output);

    if (format == "csv") {
      out << csv_header() << '\n' << csv_text;
    } else {
      out << json_text << '\n';
    }
    err << command << " (config " << hash.substr(0, 12) << ")\n";
    print_table(output, err);
    if (!out_dir.empty()) write_outputs(out_dir, command, config_path, config, hash, json_text, csv_text);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::BadParameter:
      case ErrorCode::BadAlpha:
      case ErrorCode::BadExponent:
      case ErrorCode::EmptyFamily:
      case ErrorCode::LengthMismatch:
      case ErrorCode::DimensionMismatch:
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
      default:
        err << "math-domain error: " << e.what() << '\n';
        return kExitMath;
    }
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace npdetect::cli
