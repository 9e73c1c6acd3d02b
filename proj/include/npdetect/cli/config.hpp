#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "npdetect/matgauss.hpp"
#include "npdetect/robustset.hpp"
#include "npdetect/spectral_density.hpp"

namespace npdetect::cli {

using Json = nlohmann::json;

/// Schema violation in a config file; `path()` is a JSON pointer to the
/// offending key. Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error("config error at " + (path.empty() ? std::string("/") : path) + ": " + what),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Read-only view of a JSON object that tracks its pointer path and rejects
/// keys it was not asked about.
class ConfigNode {
 public:
  ConfigNode(const Json& json, std::string path);

  const std::string& path() const noexcept { return path_; }
  const Json& json() const noexcept { return json_; }

  bool has(std::string_view key) const;
  ConfigNode child(std::string_view key) const;
  std::string child_path(std::string_view key) const;

  double number(std::string_view key) const;
  double number_or(std::string_view key, double fallback) const;
  std::uint64_t unsigned_integer(std::string_view key) const;
  std::uint64_t unsigned_integer_or(std::string_view key, std::uint64_t fallback) const;
  std::string string(std::string_view key) const;
  std::string string_or(std::string_view key, std::string fallback) const;

  /// Throws if the object holds a key outside `allowed`.
  void allow_only(std::initializer_list<std::string_view> allowed) const;

  /// Raw value at `key`; throws "missing required key" if absent.
  const Json& at(std::string_view key) const;

  const Json& json_;
  std::string path_;
};

CovarianceSpec parse_covariance(const ConfigNode& node);
SpectralDensity parse_density(const ConfigNode& node);
SlackPolicy parse_slack(const ConfigNode& node);

/// SHA-256 of json.dump() (sorted keys, no whitespace), lowercase hex.
std::string config_hash(const Json& config);

}  // namespace npdetect::cli
