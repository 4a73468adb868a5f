#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace pulsesync::cli {

enum ExitCode : int { ok = 0, validation = 2, numerical = 3, censored = 4 };

/// Experiment configuration. Every field has a default; the emitted
/// provenance copy lists all of them.
struct Config {
  std::string command;
  std::string output = "pulsesync-out";

  struct Model {
    double nu = 0.04, a = 0.1, epsilon = 0.01, gamma = 4.0;
    double g_constant = 1.0, g_linear = 0.0;
  } model;

  struct Grid {
    int L = 16;
    int N = 512;
  } grid;

  struct Solver {
    double newton_tol = 1e-10, tol_bvp = 1e-8, tol_adj = 1e-8, tol_eig = 1e-6;
    int max_iter = 30;
    double warmup = 400.0;
    double t_relax = 300.0, isochron_dt = 0.01, q_eps = 1e-3;
    bool isochron_extrapolate = false;
  } solver;

  struct Noise {
    int K = 1;
    std::vector<double> alpha{1.0, 0.0, 1.0};
    double sigma = 0.1;
    std::vector<double> sigmas{0.2, 0.14, 0.1, 0.07, 0.05};
  } noise;

  struct Run {
    double dt = 0.0;       // 0: the command's default rule
    double horizon = 0.0;  // 0: the command's default in units of sigma^-2
    int reps = 1;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;  // overrides seed/reps when nonempty
    long stride = 100;
    std::vector<double> initial{0.0, 0.3};
    double x0 = 0.0, y0 = 0.3;
    double threshold = 1e-2;
    double horizon_factor = 1e4;
    double dt_cap = 1e-3;
    int threads = 0;
    int n_fp = 256;
    double burn_in = -1.0;
    int batches = 50;
    std::string scheme = "ito";
    double checkpoint = -1.0;
    double gain = 2.0;
    double squeeze_epsilon = 0.05;
    int refine = 3;
  } run;

  struct Inputs {
    std::string pulse;    // pulse file from `pulse`
    std::string reduced;  // reduced-model file from `coeffs`
  } inputs;

  /// Strict: unknown keys and mistyped values throw ValidationError naming the field.
  static Config from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::vector<std::uint64_t> seed_list() const;
};

Config load_config(const std::string& path);

/// Runs one command with its artifacts under config.output.
int run_command(const std::string& command, const Config& config, std::ostream& log);

/// Entry point taking the raw argument list (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const std::vector<std::string>& command_names();

}  // namespace pulsesync::cli
