#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pulsesync/errors.hpp"
#include "runner.hpp"

namespace fs = std::filesystem;
using namespace pulsesync::cli;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pulsesync_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

int invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  return run(args, out, err);
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_WITH_AS(Config::from_json(json{{"grid", {{"NN", 3}}}}),
                       doctest::Contains("grid.NN"), pulsesync::ValidationError);
  CHECK_THROWS_AS(Config::from_json(json{{"noise", {{"sigma", "big"}}}}), pulsesync::ValidationError);
  CHECK_THROWS_AS(Config::from_json(json{{"noise", {{"K", 2}}}}), pulsesync::ValidationError);
  const Config c = Config::from_json(json{{"noise", {{"sigma", 0.3}}}, {"run", {{"seeds", {4, 5}}}}});
  CHECK(c.noise.sigma == 0.3);
  CHECK(c.seed_list() == std::vector<std::uint64_t>{4, 5});
  const Config back = Config::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
}

TEST_CASE("invalid input maps to the validation exit code") {
  const fs::path dir = scratch("invalid");
  const fs::path cfg = write_config(dir, {{"grid", {{"NN", 3}}}});
  CHECK(invoke({"reduced-sim", "-c", cfg.string(), "-o", (dir / "a").string()}) == ExitCode::validation);
  CHECK(invoke({"no-such-command"}) == ExitCode::validation);
  CHECK(invoke({"density", "-c", (dir / "missing.json").string()}) == ExitCode::validation);

  const fs::path mismatch = write_config(dir, {{"command", "pulse"}});
  CHECK(invoke({"density", "-c", mismatch.string(), "-o", (dir / "b").string()}) == ExitCode::validation);

  const fs::path degenerate = write_config(dir, {{"noise", {{"alpha", {1.0, 0.0, 0.0}}}}});
  CHECK(invoke({"reduced-sim", "-c", degenerate.string(), "-o", (dir / "c").string()}) ==
        ExitCode::validation);
  CHECK(fs::exists(dir / "c" / "FAILED"));
  const json prov = read_json(dir / "c" / "provenance.json");
  CHECK(prov["status"] == "failed");
  CHECK(prov["exit_code"] == ExitCode::validation);
  CHECK(prov["error"].get<std::string>().find("nondegeneracy") != std::string::npos);

  const fs::path negative = write_config(dir, {{"noise", {{"sigma", -0.1}}}});
  CHECK(invoke({"lyapunov", "-c", negative.string(), "-o", (dir / "d").string()}) ==
        ExitCode::validation);
}

TEST_CASE("squeeze demo writes artifacts and provenance") {
  const fs::path dir = scratch("squeeze");
  CHECK(invoke({"squeeze-demo", "-o", dir.string()}) == ExitCode::ok);
  CHECK(fs::exists(dir / "squeeze.dat"));
  CHECK_FALSE(fs::exists(dir / "FAILED"));
  const json prov = read_json(dir / "provenance.json");
  CHECK(prov["command"] == "squeeze-demo");
  CHECK(prov["status"] == "ok");
  CHECK(prov["config"]["run"]["gain"] == 2.0);
  CHECK(prov["results"]["holds"] == json::array({true, true, true}));
  CHECK(prov["versions"].get<std::string>().find("fftw") != std::string::npos);
}

TEST_CASE("pipeline from pulse to reduced simulation is reproducible") {
  const fs::path dir = scratch("pipeline");
  const json base = {{"grid", {{"L", 16}, {"N", 256}}}, {"noise", {{"alpha", {1.0, 0.0, 1.0}}}}};
  const fs::path cfg = write_config(dir, base);
  REQUIRE(invoke({"coeffs", "-c", cfg.string(), "-o", (dir / "coeffs").string()}) == ExitCode::ok);
  const json coeffs = read_json(dir / "coeffs" / "provenance.json");
  CHECK(coeffs["results"]["pulse"]["speed"].get<double>() == doctest::Approx(0.0929).epsilon(1e-2));
  CHECK(coeffs["results"]["nondegeneracy"]["passed"] == true);
  REQUIRE(fs::exists(dir / "coeffs" / "reduced.json"));

  json sim = base;
  sim["inputs"] = {{"reduced", (dir / "coeffs" / "reduced.json").string()}};
  sim["run"] = {{"horizon", 50.0}, {"seed", 11}, {"initial", {0.0, 0.2, 0.6}}};
  const fs::path sim_cfg = write_config(dir, sim);
  REQUIRE(invoke({"reduced-sim", "-c", sim_cfg.string(), "-o", (dir / "s1").string()}) == ExitCode::ok);
  REQUIRE(invoke({"reduced-sim", "-c", sim_cfg.string(), "-o", (dir / "s2").string()}) == ExitCode::ok);
  const std::string first = slurp(dir / "s1" / "trajectory.dat");
  CHECK_FALSE(first.empty());
  CHECK(first == slurp(dir / "s2" / "trajectory.dat"));
  const json prov = read_json(dir / "s1" / "provenance.json");
  CHECK(prov["seeds"] == json::array({11}));
  CHECK(prov["results"]["order_violations"] == 0);

  REQUIRE(invoke({"density", "-c", sim_cfg.string(), "-o", (dir / "d").string()}) == ExitCode::ok);
  const json dens = read_json(dir / "d" / "provenance.json");
  CHECK(dens["results"]["residual"].get<double>() < 1e-8);
  CHECK(dens["results"]["integral"].get<double>() == doctest::Approx(1.0));
}

}  // TEST_SUITE
