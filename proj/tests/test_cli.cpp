#include <catch_amalgamated.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "npdetect/cli/app.hpp"
#include "npdetect/cli/commands.hpp"

using namespace npdetect::cli;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

class Workspace {
 public:
  Workspace() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() / ("npdetect_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string write(const std::string& name, const Json& j) const { return write(name, j.dump()); }
  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_app(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Json diag(std::vector<double> v) { return {{"kind", "diagonal"}, {"eigenvalues", v}}; }

// One small valid config per command.
Json base_config(const std::string& command) {
  if (command == "kl") return {{"M", diag({2.0, 2.0})}, {"V", diag({1.0, 3.0})}};
  if (command == "membership")
    return {{"model", "covariance"}, {"M", diag({2.0, 2.0})}, {"V", diag({4.0, 4.0})},
            {"slack", {{"kind", "explicit"}, {"epsilon", 0.0}}}};
  if (command == "bounds") return {{"M", diag({2.0, 2.0, 2.0})}, {"alpha", 0.1}, {"mc_samples", 10000}, {"seed", 1}};
  if (command == "detect")
    return {{"M", diag({2.0})}, {"alpha", 0.05}, {"mc_samples", 10000}, {"seed", 2},
            {"observations", {{0.0}, {3.0}}}};
  if (command == "simulate")
    return {{"experiment", "miss"}, {"M", {{"kind", "scaled_identity"}, {"c", 2.0}, {"n", 4}}},
            {"V", {{"kind", "ar1"}, {"a", 0.3}, {"n", 4}}}, {"alpha", 0.1}, {"calibration_samples", 10000},
            {"calibration_seed", 3}, {"trials", 1000}, {"seed", 4}};
  if (command == "spectral")
    return {{"fS", {{"kind", "ar1"}, {"a", 0.5}}}, {"fK", {{"kind", "ar1"}, {"a", 0.3}}}, {"tol", 0.0},
            {"grid_points", 256}, {"szego_n", 16}};
  return {{"M0", diag({2.0, 2.0})}, {"family", Json::array({diag({2.0, 2.0}), diag({3.0, 4.0})})},
          {"slack", {{"kind", "default_sqrt"}}}};
}

}  // namespace

TEST_CASE("version, help and usage errors", "[cli]") {
  CHECK(run({"--version"}).out == std::string(kToolVersion) + "\n");
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({}).code != kExitOk);
  CHECK(run({"nosuch", "x.json"}).code == kExitConfig);
  CHECK(run({"kl"}).code == kExitConfig);
}

TEST_CASE("kl output", "[cli]") {
  Workspace ws;
  const auto id = run({"kl", ws.write("id.json", Json{{"M", {{"kind", "scaled_identity"}, {"c", 1.0}, {"n", 3}}}})});
  REQUIRE(id.code == kExitOk);
  CHECK(Json::parse(id.out)["kl_identity"].get<double>() == 0.0);

  const auto two = run({"kl", ws.write("two.json", Json{{"M", diag({2.0, 2.0})}})});
  REQUIRE(two.code == kExitOk);
  CHECK(Json::parse(two.out)["kl_identity"].get<double>() == Approx(std::log(2.0) - 0.5).epsilon(1e-15));
  CHECK(Json::parse(two.out)["kl_identity"].get<double>() == Approx(0.19315).margin(1e-5));
  CHECK(two.err.find("kl_identity") != std::string::npos);

  const auto csv = run({"--format", "csv", "kl", ws.path("two.json").string()});
  REQUIRE(csv.code == kExitOk);
  CHECK(csv.out.rfind(csv_header(), 0) == 0);
  CHECK(csv.out.find(",kl_identity,") != std::string::npos);
}

TEST_CASE("membership output", "[cli]") {
  Workspace ws;
  const auto inf = run({"membership", ws.write("inf.json", Json{{"M", diag({0.5})}, {"V", diag({4.0})},
                                                                 {"slack", {{"kind", "explicit"}, {"epsilon", 1.0}}}})});
  REQUIRE(inf.code == kExitOk);
  const Json r = Json::parse(inf.out);
  CHECK(r["log_moment"] == "inf");
  CHECK(r["pd_guard_ok"] == false);
  CHECK(r["member"] == false);

  const auto ok = run({"membership", ws.write("ok.json", Json{{"M", diag({2.0})}, {"V", diag({4.0})},
                                                               {"slack", {{"kind", "explicit"}, {"epsilon", 0.0}}}})});
  REQUIRE(ok.code == kExitOk);
  CHECK(Json::parse(ok.out)["log_moment"].get<double>() == Approx(std::log(2.0 / std::sqrt(6.0))).epsilon(1e-14));
  CHECK(Json::parse(ok.out)["log_moment"].get<double>() == Approx(-0.20273).margin(1e-5));
  CHECK(Json::parse(ok.out)["core_member"] == true);

  const auto sig = run({"membership", ws.write("sig.json", Json{{"model", "signal"}, {"S", diag({1.0})},
                                                                 {"V", diag({3.0})},
                                                                 {"slack", {{"kind", "explicit"}, {"epsilon", 0.5}}}})});
  REQUIRE(sig.code == kExitOk);
  CHECK(Json::parse(sig.out)["log_moment"].get<double>() == Approx(std::log(1.5)).epsilon(1e-14));
}

TEST_CASE("spectral and inverse outputs", "[cli]") {
  Workspace ws;
  const auto same = run({"spectral", ws.write("s.json", Json{{"fS", {{"kind", "ar1"}, {"a", 0.0}}},
                                                             {"fK", {{"kind", "ar1"}, {"a", 0.0}}}})});
  REQUIRE(same.code == kExitOk);
  CHECK(Json::parse(same.out)["functional"].get<double>() == Approx(0.0).margin(1e-14));
  CHECK(Json::parse(same.out)["member"] == true);

  const auto self = run({"inverse", ws.write("i.json", Json{{"M0", diag({2.0, 3.0})},
                                                            {"family", Json::array({diag({2.0, 3.0})})},
                                                            {"slack", {{"kind", "explicit"}, {"epsilon", 0.0}}}})});
  REQUIRE(self.code == kExitOk);
  CHECK(Json::parse(self.out)["satisfied"] == true);
}

TEST_CASE("detect decisions", "[cli]") {
  Workspace ws;
  const auto r = run({"detect", ws.write("d.json", base_config("detect"))});
  REQUIRE(r.code == kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j["decisions"][0]["decision"] == "H0");
  CHECK(j["decisions"][1]["decision"] == "H1");
}

TEST_CASE("malformed input exits with the config code", "[cli]") {
  Workspace ws;
  CHECK(run({"kl", ws.write("bad.json", std::string("{\"M\": [1, 2"))}).code == kExitConfig);
  CHECK(run({"kl", ws.path("missing.json").string()}).code == kExitConfig);
  CHECK(run({"kl", ws.write("arr.json", std::string("[1, 2]"))}).code == kExitConfig);
  const auto bad_kind = run({"kl", ws.write("kind.json", Json{{"M", {{"kind", "diagnal"}, {"eigenvalues", {1.0}}}}})});
  CHECK(bad_kind.code == kExitConfig);
  CHECK(bad_kind.err.find("/M/kind") != std::string::npos);
}

TEST_CASE("math-domain failures exit 3", "[cli]") {
  Workspace ws;
  Json cfg = base_config("simulate");
  cfg["experiment"] = "robustness";
  cfg["M"] = {{"kind", "scaled_identity"}, {"c", 0.5}, {"n", 4}};
  cfg["V"] = {{"kind", "scaled_identity"}, {"c", 4.0}, {"n", 4}};
  const auto r = run({"simulate", ws.write("r.json", cfg)});
  CHECK(r.code == kExitMath);

  const auto degenerate = run({"bounds", ws.write("b.json", Json{{"M", diag({1.0, 1.0})}, {"alpha", 0.1}})});
  CHECK(degenerate.code == kExitMath);
}

TEST_CASE("corrupted configs name the offending key", "[cli]") {
  Workspace ws;
  struct Mutation {
    std::string command;
    std::string pointer;  // location reported in the message
    std::function<void(Json&)> apply;
  };
  const std::vector<Mutation> mutations = {
      {"kl", "/M", [](Json& j) { j.erase("M"); }},
      {"kl", "/M/eigenvalues/1", [](Json& j) { j["M"]["eigenvalues"][1] = "two"; }},
      {"kl", "/M/eigenvalues", [](Json& j) { j["M"]["eigenvalues"] = 3; }},
      {"kl", "/extra", [](Json& j) { j["extra"] = 1; }},
      {"kl", "/V", [](Json& j) { j["V"] = diag({1.0, 2.0, 3.0}); }},
      {"membership", "/slack/kind", [](Json& j) { j["slack"]["kind"] = "huge"; }},
      {"membership", "/slack/epsilon", [](Json& j) { j["slack"]["epsilon"] = -1.0; }},
      {"membership", "/model", [](Json& j) { j["model"] = "other"; }},
      {"membership", "/M/eigenvalues/0", [](Json& j) { j["M"]["eigenvalues"][0] = -2.0; }},
      {"bounds", "/alpha", [](Json& j) { j["alpha"] = 1.5; }},
      {"bounds", "/mc_samples", [](Json& j) { j["mc_samples"] = 10; }},
      {"bounds", "/p", [](Json& j) { j["p"] = 3.0; }},
      {"detect", "/observations/1", [](Json& j) { j["observations"][1] = {1.0, 2.0}; }},
      {"simulate", "/experiment", [](Json& j) { j["experiment"] = "nothing"; }},
      {"simulate", "/trials", [](Json& j) { j["trials"] = 5; }},
      {"simulate", "/V/a", [](Json& j) { j["V"]["a"] = 1.0; }},
      {"simulate", "/M/n", [](Json& j) { j["M"]["n"] = 0; }},
      {"spectral", "/grid_points", [](Json& j) { j["grid_points"] = 101; }},
      {"spectral", "/fK/values", [](Json& j) { j["fK"] = {{"kind", "grid"}, {"values", {1.0, 2.0, 3.0}}}; }},
      {"inverse", "/family", [](Json& j) { j["family"] = Json::array(); }},
      {"inverse", "/family/1", [](Json& j) { j["family"][1] = diag({1.0}); }},
  };
  int index = 0;
  for (const auto& m : mutations) {
    Json cfg = base_config(m.command);
    REQUIRE(run({m.command, ws.write("ok" + std::to_string(index) + ".json", cfg)}).code == kExitOk);
    m.apply(cfg);
    const auto r = run({m.command, ws.write("bad" + std::to_string(index) + ".json", cfg)});
    INFO(m.command << " " << m.pointer << ": " << r.err);
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("at " + m.pointer) != std::string::npos);
    ++index;
  }
}

TEST_CASE("outputs, manifest and replay", "[cli]") {
  Workspace ws;
  const std::string out_dir = ws.path("results").string();
  const std::string config = ws.write("sim.json", base_config("simulate"));

  const auto t0 = std::chrono::steady_clock::now();
  const auto first = run({"--seed", "77", "--out", out_dir, "simulate", config});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(first.code == kExitOk);
  CHECK(seconds < 5.0);
  CHECK(Json::parse(first.out)["seed"] == 77);

  const Json manifest = Json::parse(slurp(fs::path(out_dir) / "simulate.manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["tool_version"] == kToolVersion);
  CHECK(manifest["config_hash"].get<std::string>().size() == 64);
  CHECK(manifest.contains("timestamp"));
  CHECK(slurp(fs::path(out_dir) / "simulate.json") == first.out);

  const std::string csv = slurp(fs::path(out_dir) / "simulate.csv");
  CHECK(csv.rfind(csv_header(), 0) == 0);

  // Replaying the embedded config reproduces the result byte for byte.
  const auto replay = run({"simulate", ws.write("replay.json", manifest["config"])});
  REQUIRE(replay.code == kExitOk);
  CHECK(replay.out == first.out);

  // A second run appends rows without repeating the header.
  REQUIRE(run({"--seed", "77", "--out", out_dir, "simulate", config}).code == kExitOk);
  const std::string csv2 = slurp(fs::path(out_dir) / "simulate.csv");
  CHECK(csv2.size() > csv.size());
  CHECK(csv2.find(csv_header(), 1) == std::string::npos);
}

TEST_CASE("every command is deterministic", "[cli][property]") {
  Workspace ws;
  for (const auto& command : command_names()) {
    const std::string config = ws.write(command + ".json", base_config(command));
    const auto a = run({command, config});
    const auto b = run({command, config});
    INFO(command << ": " << a.err);
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("installed binary maps errors to exit codes", "[cli]") {
  Workspace ws;
  const std::string tool = NPDETECT_TOOL_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((tool + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("kl " + ws.write("kl.json", base_config("kl"))) == kExitOk);
  CHECK(status("kl " + ws.write("bad.json", std::string("{"))) == kExitConfig);
  CHECK(status("--version") == kExitOk);
}
