#include "npdetect/cli/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace npdetect::cli {

namespace {

constexpr std::uint64_t kMaxDimension = 4096;

std::string describe(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return "null";
    case Json::value_t::boolean: return "boolean";
    case Json::value_t::string: return "string";
    case Json::value_t::array: return "array";
    case Json::value_t::object: return "object";
    default: return "number";
  }
}

std::string escape_pointer_token(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected number, got " + describe(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "number must be finite");
  return v;
}

std::vector<double> number_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected array, got " + describe(j));
  if (j.empty()) throw ConfigError(path, "array must not be empty");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "/" + std::to_string(i)));
  return out;
}

std::size_t dimension(const ConfigNode& node) {
  const auto n = node.unsigned_integer("n");
  if (n == 0 || n > kMaxDimension) {
    throw ConfigError(node.child_path("n"), "dimension must be in [1, " + std::to_string(kMaxDimension) + "]");
  }
  return static_cast<std::size_t>(n);
}

double ar1_parameter(const ConfigNode& node) {
  const double a = node.number("a");
  if (!(a >= 0.0 && a <= kMaxAr1)) throw ConfigError(node.child_path("a"), "ar1 parameter must lie in [0, 0.999]");
  return a;
}

}  // namespace

ConfigNode::ConfigNode(const Json& json, std::string path) : json_(json), path_(std::move(path)) {
  if (!json_.is_object()) throw ConfigError(path_, "expected object, got " + describe(json_));
}

bool ConfigNode::has(std::string_view key) const { return json_.contains(std::string(key)); }

std::string ConfigNode::child_path(std::string_view key) const {
  return path_ + "/" + escape_pointer_token(key);
}

const Json& ConfigNode::at(std::string_view key) const {
  const auto it = json_.find(std::string(key));
  if (it == json_.end()) throw ConfigError(child_path(key), "missing required key");
  return *it;
}

ConfigNode ConfigNode::child(std::string_view key) const { return ConfigNode(at(key), child_path(key)); }

double ConfigNode::number(std::string_view key) const { return as_number(at(key), child_path(key)); }

double ConfigNode::number_or(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::uint64_t ConfigNode::unsigned_integer(std::string_view key) const {
  const Json& j = at(key);
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw ConfigError(child_path(key), "expected nonnegative integer, got " + describe(j));
  }
  return j.get<std::uint64_t>();
}

std::uint64_t ConfigNode::unsigned_integer_or(std::string_view key, std::uint64_t fallback) const {
  return has(key) ? unsigned_integer(key) : fallback;
}

std::string ConfigNode::string(std::string_view key) const {
  const Json& j = at(key);
  if (!j.is_string()) throw ConfigError(child_path(key), "expected string, got " + describe(j));
  return j.get<std::string>();
}

std::string ConfigNode::string_or(std::string_view key, std::string fallback) const {
  return has(key) ? string(key) : std::move(fallback);
}

void ConfigNode::allow_only(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [key, value] : json_.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(child_path(key), "unknown key");
    }
  }
}

CovarianceSpec parse_covariance(const ConfigNode& node) {
  const std::string kind = node.string("kind");
  if (kind == "dense") {
    node.allow_only({"kind", "entries"});
    const std::string path = node.child_path("entries");
    const Json& rows = node.at("entries");
    if (!rows.is_array() || rows.empty()) throw ConfigError(path, "expected non-empty array of rows");
    const auto n = rows.size();
    if (n > kMaxDimension) throw ConfigError(path, "dimension too large");
    Eigen::MatrixXd entries(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const std::string row_path = path + "/" + std::to_string(i);
      const auto row = number_array(rows[i], row_path);
      if (row.size() != n) throw ConfigError(row_path, "row length differs from row count (matrix must be square)");
      for (std::size_t j = 0; j < n; ++j) {
        entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
      }
    }
    return spec::Dense{std::move(entries)};
  }
  if (kind == "diagonal") {
    node.allow_only({"kind", "eigenvalues"});
    const std::string path = node.child_path("eigenvalues");
    auto values = number_array(node.at("eigenvalues"), path);
    if (values.size() > kMaxDimension) throw ConfigError(path, "dimension too large");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > 0.0)) throw ConfigError(path + "/" + std::to_string(i), "eigenvalue must be positive");
    }
    return spec::Diagonal{std::move(values)};
  }
  if (kind == "scaled_identity") {
    node.allow_only({"kind", "c", "n"});
    const double c = node.number("c");
    if (!(c > 0.0)) throw ConfigError(node.child_path("c"), "scale must be positive");
    return spec::ScaledIdentity{c, dimension(node)};
  }
  if (kind == "ar1") {
    node.allow_only({"kind", "a", "n"});
    return spec::Ar1{ar1_parameter(node), dimension(node)};
  }
  if (kind == "toeplitz_from_spectrum") {
    node.allow_only({"kind", "density", "n"});
    return spec::ToeplitzFromSpectrum{parse_density(node.child("density")), dimension(node)};
  }
  throw ConfigError(node.child_path("kind"), "unknown covariance kind '" + kind + "'");
}

SpectralDensity parse_density(const ConfigNode& node) {
  const std::string kind = node.string("kind");
  if (kind == "ar1") {
    node.allow_only({"kind", "a"});
    return SpectralDensity::ar1(ar1_parameter(node));
  }
  if (kind == "grid") {
    node.allow_only({"kind", "values"});
    const std::string path = node.child_path("values");
    auto values = number_array(node.at("values"), path);
    if (values.size() < 3) throw ConfigError(path, "grid needs at least 3 nodes");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] >= 0.0)) throw ConfigError(path + "/" + std::to_string(i), "density must be nonnegative");
    }
    const std::size_t last = values.size() - 1;
    for (std::size_t i = 0; i <= last / 2; ++i) {
      if (std::abs(values[i] - values[last - i]) > 1e-9) {
        throw ConfigError(path + "/" + std::to_string(i), "density must be symmetric in omega");
      }
    }
    return SpectralDensity::grid(std::move(values));
  }
  throw ConfigError(node.child_path("kind"), "unknown density kind '" + kind + "'");
}

SlackPolicy parse_slack(const ConfigNode& node) {
  const std::string kind = node.string("kind");
  if (kind == "explicit") {
    node.allow_only({"kind", "epsilon"});
    const double eps = node.number("epsilon");
    if (!(eps >= 0.0)) throw ConfigError(node.child_path("epsilon"), "epsilon must be nonnegative");
    return SlackPolicy::explicit_budget(eps);
  }
  if (kind == "default_sqrt") {
    node.allow_only({"kind", "c"});
    const double c = node.number_or("c", 1.0);
    if (!(c > 0.0)) throw ConfigError(node.child_path("c"), "c must be positive");
    return SlackPolicy::default_sqrt(c);
  }
  throw ConfigError(node.child_path("kind"), "unknown slack kind '" + kind + "'");
}

std::string config_hash(const Json& config) {
  const std::string canonical = config.dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream os;
  os << std::hex;
  for (unsigned int i = 0; i < length; ++i) {
    os.width(2);
    os.fill('0');
    os << static_cast<int>(digest[i]);
  }
  return os.str();
}

}  // namespace npdetect::cli
