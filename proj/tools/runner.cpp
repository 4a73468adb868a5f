#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "pulsesync/errors.hpp"
#include "pulsesync/io.hpp"
#include "pulsesync/measure.hpp"
#include "pulsesync/parallel.hpp"
#include "pulsesync/spde.hpp"
#include "pulsesync/spectral.hpp"
#include "pulsesync/squeeze.hpp"
#include "pulsesync/stats.hpp"
#include "pulsesync/torus.hpp"

namespace pulsesync::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool nonnegative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

/// Reads the keys of one config object and rejects the ones it never asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ValidationError("config field '" + name_ + "' must be an object");
  }

  void get(const char* key, double& dst) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "a number");
      dst = v->get<double>();
    }
  }
  void get(const char* key, int& dst) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "an integer");
      dst = v->get<int>();
    }
  }
  void get(const char* key, long& dst) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "an integer");
      dst = v->get<long>();
    }
  }
  void get(const char* key, std::uint64_t& dst) {
    if (const json* v = find(key)) {
      if (!nonnegative_integer(*v)) fail(key, "a nonnegative integer");
      dst = v->get<std::uint64_t>();
    }
  }
  void get(const char* key, bool& dst) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "true or false");
      dst = v->get<bool>();
    }
  }
  void get(const char* key, std::string& dst) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "a string");
      dst = v->get<std::string>();
    }
  }
  void get(const char* key, std::vector<double>& dst) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "an array of numbers");
      dst.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail(key, "an array of numbers");
        dst.push_back(x.get<double>());
      }
    }
  }
  void get(const char* key, std::vector<std::uint64_t>& dst) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "an array of nonnegative integers");
      dst.clear();
      for (const auto& x : *v) {
        if (!nonnegative_integer(x)) fail(key, "an array of nonnegative integers");
        dst.push_back(x.get<std::uint64_t>());
      }
    }
  }
  std::optional<Section> child(const char* key) {
    if (const json* v = find(key)) return Section(*v, path(key));
    return std::nullopt;
  }
  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw ValidationError("unknown config key '" + path(item.key()) + "'");
  }

 private:
  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string path(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }
  [[noreturn]] void fail(const std::string& key, const char* what) const {
    throw ValidationError("config field '" + path(key) + "' must be " + what);
  }

  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

Config Config::from_json(const json& j) {
  Config c;
  Section root(j, "");
  root.get("command", c.command);
  root.get("output", c.output);
  if (auto s = root.child("model")) {
    s->get("nu", c.model.nu);
    s->get("a", c.model.a);
    s->get("epsilon", c.model.epsilon);
    s->get("gamma", c.model.gamma);
    s->get("g_constant", c.model.g_constant);
    s->get("g_linear", c.model.g_linear);
    s->finish();
  }
  if (auto s = root.child("grid")) {
    s->get("L", c.grid.L);
    s->get("N", c.grid.N);
    s->finish();
  }
  if (auto s = root.child("solver")) {
    s->get("newton_tol", c.solver.newton_tol);
    s->get("tol_bvp", c.solver.tol_bvp);
    s->get("tol_adj", c.solver.tol_adj);
    s->get("tol_eig", c.solver.tol_eig);
    s->get("max_iter", c.solver.max_iter);
    s->get("warmup", c.solver.warmup);
    s->get("t_relax", c.solver.t_relax);
    s->get("isochron_dt", c.solver.isochron_dt);
    s->get("isochron_extrapolate", c.solver.isochron_extrapolate);
    s->get("q_eps", c.solver.q_eps);
    s->finish();
  }
  if (auto s = root.child("noise")) {
    s->get("K", c.noise.K);
    s->get("alpha", c.noise.alpha);
    s->get("sigma", c.noise.sigma);
    s->get("sigmas", c.noise.sigmas);
    s->finish();
  }
  if (auto s = root.child("run")) {
    auto& r = c.run;
    s->get("dt", r.dt);
    s->get("horizon", r.horizon);
    s->get("reps", r.reps);
    s->get("seed", r.seed);
    s->get("seeds", r.seeds);
    s->get("stride", r.stride);
    s->get("initial", r.initial);
    s->get("x0", r.x0);
    s->get("y0", r.y0);
    s->get("threshold", r.threshold);
    s->get("horizon_factor", r.horizon_factor);
    s->get("dt_cap", r.dt_cap);
    s->get("threads", r.threads);
    s->get("n_fp", r.n_fp);
    s->get("burn_in", r.burn_in);
    s->get("batches", r.batches);
    s->get("scheme", r.scheme);
    s->get("checkpoint", r.checkpoint);
    s->get("gain", r.gain);
    s->get("squeeze_epsilon", r.squeeze_epsilon);
    s->get("refine", r.refine);
    s->finish();
  }
  if (auto s = root.child("inputs")) {
    s->get("pulse", c.inputs.pulse);
    s->get("reduced", c.inputs.reduced);
    s->finish();
  }
  root.finish();

  require(c.grid.L >= 1, "config field 'grid.L' must be a positive integer");
  require(c.grid.N >= 16 && (c.grid.N & (c.grid.N - 1)) == 0,
          "config field 'grid.N' must be a power of two >= 16");
  require(c.noise.K >= 0, "config field 'noise.K' must be nonnegative");
  require(c.noise.alpha.size() == static_cast<std::size_t>(2 * c.noise.K + 1),
          "config field 'noise.alpha' must have 2K + 1 entries (alpha_-K .. alpha_K)");
  require(c.noise.sigma >= 0.0, "config field 'noise.sigma' must be nonnegative");
  for (double s : c.noise.sigmas) require(s > 0.0, "config field 'noise.sigmas' must be positive");
  require(c.run.reps >= 1, "config field 'run.reps' must be at least 1");
  require(c.run.dt >= 0.0, "config field 'run.dt' must be nonnegative");
  require(c.run.horizon >= 0.0, "config field 'run.horizon' must be nonnegative");
  require(c.run.stride >= 0, "config field 'run.stride' must be nonnegative");
  require(c.run.scheme == "ito" || c.run.scheme == "stratonovich",
          "config field 'run.scheme' must be \"ito\" or \"stratonovich\"");
  require(c.run.threshold > 0.0 && c.run.threshold < 0.5,
          "config field 'run.threshold' must lie in (0, 1/2)");
  require(c.run.refine >= 0 && c.run.refine <= 20, "config field 'run.refine' must lie in [0, 20]");
  return c;
}

json Config::to_json() const {
  return {
      {"command", command},
      {"output", output},
      {"model",
       {{"nu", model.nu},
        {"a", model.a},
        {"epsilon", model.epsilon},
        {"gamma", model.gamma},
        {"g_constant", model.g_constant},
        {"g_linear", model.g_linear}}},
      {"grid", {{"L", grid.L}, {"N", grid.N}}},
      {"solver",
       {{"newton_tol", solver.newton_tol},
        {"tol_bvp", solver.tol_bvp},
        {"tol_adj", solver.tol_adj},
        {"tol_eig", solver.tol_eig},
        {"max_iter", solver.max_iter},
        {"warmup", solver.warmup},
        {"t_relax", solver.t_relax},
        {"isochron_dt", solver.isochron_dt},
        {"isochron_extrapolate", solver.isochron_extrapolate},
        {"q_eps", solver.q_eps}}},
      {"noise",
       {{"K", noise.K}, {"alpha", noise.alpha}, {"sigma", noise.sigma}, {"sigmas", noise.sigmas}}},
      {"run",
       {{"dt", run.dt},
        {"horizon", run.horizon},
        {"reps", run.reps},
        {"seed", run.seed},
        {"seeds", run.seeds},
        {"stride", run.stride},
        {"initial", run.initial},
        {"x0", run.x0},
        {"y0", run.y0},
        {"threshold", run.threshold},
        {"horizon_factor", run.horizon_factor},
        {"dt_cap", run.dt_cap},
        {"threads", run.threads},
        {"n_fp", run.n_fp},
        {"burn_in", run.burn_in},
        {"batches", run.batches},
        {"scheme", run.scheme},
        {"checkpoint", run.checkpoint},
        {"gain", run.gain},
        {"squeeze_epsilon", run.squeeze_epsilon},
        {"refine", run.refine}}},
      {"inputs", {{"pulse", inputs.pulse}, {"reduced", inputs.reduced}}},
  };
}

std::vector<std::uint64_t> Config::seed_list() const {
  if (!run.seeds.empty()) return run.seeds;
  std::vector<std::uint64_t> out;
  for (int r = 0; r < run.reps; ++r) out.push_back(run.seed + static_cast<std::uint64_t>(r));
  return out;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return Config::from_json(j);
}

namespace {

struct Context {
  const Config& cfg;
  fs::path dir;
  std::ostream& log;
  json results = json::object();
  json seeds = json::array();
  bool censored = false;
};

ModelSpec make_model(const Config& c) {
  return fitzhugh_nagumo({c.model.nu, c.model.a, c.model.epsilon, c.model.gamma},
                         {c.model.g_constant, c.model.g_linear});
}

NoiseSpec make_noise(const Config& c, double sigma) {
  NoiseSpec n(c.noise.K, c.noise.alpha, sigma);
  n.validate();
  return n;
}

double snap(double duration, double dt) {
  return dt * static_cast<double>(std::max(1L, std::lround(duration / dt)));
}

double sigma_or_fail(const Config& c) {
  require(c.noise.sigma > 0.0, "config field 'noise.sigma' must be positive for this command");
  return c.noise.sigma;
}

json pulse_report(const PulseSolution& p) {
  return {{"speed", p.speed},
          {"bvp_residual", p.bvp_residual},
          {"newton_iterations", p.newton_iterations},
          {"a_gap", p.a_gap},
          {"zero_eigenvalue", p.zero_eigenvalue},
          {"near_zero_count", p.near_zero_count},
          {"eigenvector_cosine", p.eigenvector_cosine},
          {"adjoint_residual", p.adjoint_residual},
          {"adjoint_normalization", p.normalization},
          {"second_singular", p.second_singular}};
}

PulseSolution obtain_pulse(Context& ctx, const ModelSpec& model) {
  const Config& c = ctx.cfg;
  if (!c.inputs.pulse.empty()) {
    PulseSolution p = read_pulse(fs::path(c.inputs.pulse));
    require(p.profile.grid() == Grid1D(c.grid.L, c.grid.N),
            "pulse file grid does not match config fields 'grid.L'/'grid.N'");
    return p;
  }
  PulseOptions opt;
  opt.newton_tol = c.solver.newton_tol;
  opt.tol_bvp = c.solver.tol_bvp;
  opt.tol_adj = c.solver.tol_adj;
  opt.tol_eig = c.solver.tol_eig;
  opt.max_iter = c.solver.max_iter;
  const auto [guess, speed] =
      simulated_pulse_guess(model, Grid1D(c.grid.L, c.grid.N), c.solver.warmup);
  PulseSolution p = find_pulse(model, guess, speed, opt);
  ctx.log << "pulse: c = " << format_double(p.speed) << ", residual "
          << format_double(p.bvp_residual) << "\n";
  return p;
}

void require_nondegenerate(const NoiseSpec& noise, const PairingSet& pairings) {
  const auto report = nondegeneracy_check(noise, pairings);
  if (!report.passed) throw ValidationError(report.reason);
}

/// With `stochastic`, the noise nondegeneracy guard runs before any Q work.
ReducedModel obtain_reduced(Context& ctx, const ModelSpec& model,
                            const PulseSolution* pulse = nullptr, bool stochastic = true) {
  const Config& c = ctx.cfg;
  if (!c.inputs.reduced.empty()) {
    ReducedModel r = read_reduced(fs::path(c.inputs.reduced));
    if (stochastic) require_nondegenerate(r.noise, r.pairings);
    return r;
  }
  if (stochastic && c.noise.K >= 1 &&
      (c.noise.alpha[c.noise.K + 1] == 0.0 || c.noise.alpha[c.noise.K - 1] == 0.0))
    throw ValidationError("noise nondegeneracy violated: alpha_1 and alpha_-1 must both be nonzero");
  std::optional<PulseSolution> own;
  if (!pulse) pulse = &own.emplace(obtain_pulse(ctx, model));
  const NoiseSpec noise = make_noise(c, c.noise.sigma);
  IsochronOptions iso;
  iso.t_relax = c.solver.t_relax;
  iso.dt = c.solver.isochron_dt;
  iso.extrapolate = c.solver.isochron_extrapolate;
  const IsochronMap map(*pulse, model, iso);
  PairingSet pairings = fourier_pairings(*pulse, model, noise.K);
  if (stochastic) require_nondegenerate(noise, pairings);
  q_matrix(pairings, map, model, c.solver.q_eps, [&](int k) {
    return noise.alpha_at(k) == 0.0 && noise.alpha_at(-k) == 0.0;
  });
  return build_reduced(pulse->speed, noise, pairings);
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

json series_json(const TrigSeries& s) {
  return {{"mean", s.mean()}, {"cos", s.cos_coeffs()}, {"sin", s.sin_coeffs()}};
}

void cmd_pulse(Context& ctx) {
  const ModelSpec model = make_model(ctx.cfg);
  const PulseSolution p = obtain_pulse(ctx, model);
  write_pulse(ctx.dir / "pulse.dat", p);
  ctx.results["pulse"] = pulse_report(p);
}

void cmd_coeffs(Context& ctx) {
  const ModelSpec model = make_model(ctx.cfg);
  const PulseSolution p = obtain_pulse(ctx, model);
  write_pulse(ctx.dir / "pulse.dat", p);
  const ReducedModel r = obtain_reduced(ctx, model, &p, false);
  write_reduced(ctx.dir / "reduced.json", r);

  const int n = 512;
  std::vector<std::string> names{"x", "a", "a_prime", "strat"};
  std::vector<std::vector<double>> cols(4);
  for (int k = -r.noise.K; k <= r.noise.K; ++k) {
    names.push_back("b_" + std::to_string(k));
    cols.emplace_back();
  }
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / n;
    cols[0].push_back(x);
    cols[1].push_back(r.a(x));
    cols[2].push_back(r.a_prime(x));
    cols[3].push_back(r.strat(x));
    for (int k = -r.noise.K; k <= r.noise.K; ++k) cols[4 + k + r.noise.K].push_back(r.b_at(k)(x));
  }
  write_columns(ctx.dir / "coefficients.dat", names, cols);

  const auto nd = nondegeneracy_check(r.noise, r.pairings);
  json q = json::array();
  for (const auto& row : r.pairings.q) q.push_back(row);
  ctx.results["pulse"] = pulse_report(p);
  ctx.results["pairings"] = {{"c", r.pairings.c}, {"d", r.pairings.d}, {"q", q},
                             {"q_eps", r.pairings.q_eps}};
  ctx.results["a"] = series_json(r.a);
  ctx.results["nondegeneracy"] = {{"passed", nd.passed}, {"reason", nd.reason},
                                  {"c_norm2", nd.c_norm2}, {"threshold", nd.threshold},
                                  {"min_b_norm2", nd.min_b_norm2}};
}

void cmd_reduced_sim(Context& ctx) {
  const Config& c = ctx.cfg;
  const double sigma = sigma_or_fail(c);
  const ModelSpec model = make_model(c);
  const ReducedModel r = obtain_reduced(ctx, model);
  const double dt = c.run.dt > 0.0 ? c.run.dt : default_dt(r, sigma, c.run.dt_cap);
  const double horizon = c.run.horizon > 0.0 ? c.run.horizon : snap(10.0 / (sigma * sigma), dt);
  SimulationOptions opt;
  opt.scheme = c.run.scheme == "ito" ? Scheme::ito_euler : Scheme::stratonovich_heun;
  opt.stride = c.run.stride;
  TorusEnsemble ens(c.run.initial);
  const NoisePath path(c.run.seed, r.noise.K, dt);
  const Trajectory tr = simulate(r, sigma, ens, path, horizon, opt);
  ctx.seeds.push_back(c.run.seed);

  std::vector<std::string> names{"t"};
  std::vector<std::vector<double>> cols{tr.times};
  for (std::size_t m = 0; m < c.run.initial.size(); ++m) {
    names.push_back("gamma_" + std::to_string(m));
    cols.push_back(column(tr.lifts, m));
  }
  write_columns(ctx.dir / "trajectory.dat", names, cols);
  ctx.results["dt"] = dt;
  ctx.results["horizon"] = horizon;
  ctx.results["order_violations"] = tr.order_violations;
  ctx.results["final_positions"] = ens.positions();
}

void cmd_lyapunov(Context& ctx) {
  const Config& c = ctx.cfg;
  const double sigma = sigma_or_fail(c);
  const ModelSpec model = make_model(c);
  const ReducedModel r = obtain_reduced(ctx, model);

  const StationaryDensity density = stationary_density(r, sigma, c.run.n_fp);
  const LyapunovAnalytic an = lyapunov_analytic(r, sigma, density);
  const GeneratorSpectrum gap = generator_gap(r, sigma, c.run.n_fp);

  const double dt = c.run.dt > 0.0 ? c.run.dt : default_dt(r, sigma, c.run.dt_cap);
  const double horizon =
      c.run.horizon > 0.0 ? c.run.horizon : snap(1e3 / (sigma * sigma), dt);
  const double burn = c.run.burn_in >= 0.0 ? c.run.burn_in : snap(0.01 * horizon, dt);
  const LyapunovEstimate mc = tangent_lyapunov_mc(
      r, sigma, c.run.x0, NoisePath(c.run.seed, r.noise.K, dt), horizon, burn, c.run.batches);
  ctx.seeds.push_back(c.run.seed);

  const double z = (mc.lambda - an.lambda_b) / mc.stderr_;
  write_columns(ctx.dir / "lyapunov.dat",
                {"lambda_a", "lambda_b", "lambda_mc", "stderr", "generator_gap"},
                {{an.lambda_a}, {an.lambda_b}, {mc.lambda}, {mc.stderr_}, {gap.gap}});
  ctx.results["lambda_a"] = an.lambda_a;
  ctx.results["lambda_b"] = an.lambda_b;
  ctx.results["lambda_mc"] = mc.lambda;
  ctx.results["stderr"] = mc.stderr_;
  ctx.results["z_score"] = z;
  ctx.results["generator_gap"] = gap.gap;
  ctx.results["all_negative"] = an.lambda_a < 0.0 && an.lambda_b < 0.0 && mc.lambda < 0.0;
  ctx.results["consistent"] = std::fabs(z) <= 3.0;
  ctx.results["dt"] = dt;
  ctx.results["horizon"] = horizon;
  ctx.log << "lyapunov: analytic " << format_double(an.lambda_b) << ", Monte Carlo "
          << format_double(mc.lambda) << " +- " << format_double(mc.stderr_) << "\n";
}

void cmd_density(Context& ctx) {
  const Config& c = ctx.cfg;
  const double sigma = sigma_or_fail(c);
  const ModelSpec model = make_model(c);
  const ReducedModel r = obtain_reduced(ctx, model);
  const StationaryDensity d = stationary_density(r, sigma, c.run.n_fp);
  write_columns(ctx.dir / "density.dat", {"x", "p"}, {d.x, d.p});
  ctx.results["residual"] = d.residual;
  ctx.results["integral"] = d.integral;
  ctx.results["flux"] = d.flux;
  ctx.results["flux_variation"] = d.flux_variation;
  ctx.results["second_singular"] = d.second_singular;
  ctx.results["generator_gap"] = generator_gap(r, sigma, c.run.n_fp).gap;
}

void cmd_sync_scan(Context& ctx) {
  const Config& c = ctx.cfg;
  const ModelSpec model = make_model(c);
  const ReducedModel r = obtain_reduced(ctx, model);
  ScanOptions opt;
  opt.x0 = c.run.x0;
  opt.y0 = c.run.y0;
  opt.threshold = c.run.threshold;
  opt.horizon_factor = c.run.horizon_factor;
  opt.dt_cap = c.run.dt_cap;
  opt.seed = c.run.seed;
  opt.threads = c.run.threads;
  const ScanResult scan = sync_scaling_scan(r, c.noise.sigmas, c.run.reps, opt);
  for (int k = 0; k < c.run.reps; ++k) ctx.seeds.push_back(c.run.seed + static_cast<std::uint64_t>(k));

  std::vector<std::vector<double>> cols(6);
  std::vector<std::string> time_names;
  std::vector<std::vector<double>> times;
  bool unreliable = false;
  for (const auto& row : scan.rows) {
    cols[0].push_back(row.sigma);
    cols[1].push_back(row.dt);
    cols[2].push_back(row.median_time);
    cols[3].push_back(row.reps);
    cols[4].push_back(row.censored);
    cols[5].push_back(static_cast<double>(row.order_violations));
    unreliable = unreliable || row.unreliable;
    time_names.push_back("sigma_" + format_double(row.sigma));
    times.push_back(row.times);
  }
  write_columns(ctx.dir / "sync_scan.dat",
                {"sigma", "dt", "median_time", "reps", "censored", "order_violations"}, cols);
  write_columns(ctx.dir / "sync_times.dat", time_names, times);
  ctx.results["slope"] = scan.slope;
  ctx.results["unreliable_rows"] = unreliable;
  ctx.censored = unreliable;
  ctx.log << "sync-scan: slope " << format_double(scan.slope) << "\n";
}

void cmd_spde_two_pulse(Context& ctx) {
  const Config& c = ctx.cfg;
  const double sigma = sigma_or_fail(c);
  const ModelSpec model = make_model(c);
  const PulseSolution p = obtain_pulse(ctx, model);
  const NoiseSpec noise = make_noise(c, sigma);
  require_nondegenerate(noise, fourier_pairings(p, model, noise.K));
  SpdeOptions opt;
  if (c.run.dt > 0.0) opt.dt = c.run.dt;
  opt.checkpoint = c.run.checkpoint;
  const double horizon =
      c.run.horizon > 0.0 ? c.run.horizon : snap(50.0 / (sigma * sigma), opt.dt);

  const auto seeds = c.seed_list();
  std::vector<TwoPulseReport> reports(seeds.size());
  parallel_for(
      seeds.size(),
      [&](std::size_t i) {
        reports[i] = two_pulse_experiment(p, model, noise, sigma, c.run.x0, c.run.y0, horizon,
                                          seeds[i], opt);
      },
      c.run.threads);

  std::vector<std::vector<double>> summary(7);
  std::vector<double> finals;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& r = reports[i];
    std::vector<std::vector<double>> cols(7);
    for (const auto& cp : r.checkpoints) {
      cols[0].push_back(cp.t);
      cols[1].push_back(cp.phase_u);
      cols[2].push_back(cp.phase_v);
      cols[3].push_back(cp.tube_u);
      cols[4].push_back(cp.tube_v);
      cols[5].push_back(cp.distance);
      cols[6].push_back(cp.discrepancy);
    }
    write_columns(ctx.dir / ("two_pulse_seed" + std::to_string(seeds[i]) + ".dat"),
                  {"t", "xhat_u", "xhat_v", "tube_u", "tube_v", "distance", "discrepancy"},
                  cols);
    summary[0].push_back(static_cast<double>(seeds[i]));
    summary[1].push_back(r.final_distance);
    summary[2].push_back(r.max_tube);
    summary[3].push_back(r.initial_discrepancy);
    summary[4].push_back(r.final_discrepancy);
    summary[5].push_back(r.censored ? 1.0 : 0.0);
    summary[6].push_back(r.censor_time);
    finals.push_back(r.censored ? std::numeric_limits<double>::infinity() : r.final_distance);
    ctx.seeds.push_back(seeds[i]);
    ctx.censored = ctx.censored || r.censored;
  }
  write_columns(ctx.dir / "two_pulse_summary.dat",
                {"seed", "final_distance", "max_tube", "initial_discrepancy", "final_discrepancy",
                 "censored", "censor_time"},
                summary);
  ctx.results["horizon"] = horizon;
  ctx.results["median_final_distance"] = stats::median(finals);
  ctx.results["max_tube"] = *std::max_element(summary[2].begin(), summary[2].end());
  ctx.log << "spde-two-pulse: median final distance "
          << format_double(stats::median(finals)) << "\n";
}

void cmd_reduced_vs_full(Context& ctx) {
  const Config& c = ctx.cfg;
  const double sigma = sigma_or_fail(c);
  const ModelSpec model = make_model(c);
  const PulseSolution p = obtain_pulse(ctx, model);
  const ReducedModel r = obtain_reduced(ctx, model, &p);
  SpdeOptions opt;
  if (c.run.dt > 0.0) opt.dt = c.run.dt;
  opt.checkpoint = c.run.checkpoint;
  opt.reduced_refine = c.run.refine;
  const double horizon =
      c.run.horizon > 0.0 ? c.run.horizon : snap(10.0 / (sigma * sigma), opt.dt);

  const auto seeds = c.seed_list();
  std::vector<ComparisonReport> reports(seeds.size());
  parallel_for(
      seeds.size(),
      [&](std::size_t i) {
        reports[i] = reduced_vs_full(p, r, model, sigma, c.run.x0, horizon, seeds[i], opt);
      },
      c.run.threads);

  std::vector<std::vector<double>> summary(4);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& rep = reports[i];
    std::vector<std::vector<double>> cols(4);
    for (const auto& cp : rep.checkpoints) {
      cols[0].push_back(cp.t);
      cols[1].push_back(cp.phase_u);
      cols[2].push_back(cp.gamma);
      cols[3].push_back(cp.tube_u);
    }
    write_columns(ctx.dir / ("reduced_vs_full_seed" + std::to_string(seeds[i]) + ".dat"),
                  {"t", "xhat", "gamma", "tube"}, cols);
    summary[0].push_back(static_cast<double>(seeds[i]));
    summary[1].push_back(rep.max_phase_error);
    summary[2].push_back(rep.first_tube_exit);
    summary[3].push_back(rep.censored ? 1.0 : 0.0);
    ctx.seeds.push_back(seeds[i]);
    ctx.censored = ctx.censored || rep.censored;
  }
  write_columns(ctx.dir / "reduced_vs_full_summary.dat",
                {"seed", "max_phase_error", "first_tube_exit", "censored"}, summary);
  ctx.results["horizon"] = horizon;
  ctx.results["discrete_speed"] = reports.empty() ? 0.0 : reports[0].discrete_speed;
  ctx.results["median_max_phase_error"] = stats::median(summary[1]);
}

void cmd_squeeze(Context& ctx) {
  const Config& c = ctx.cfg;
  SqueezeOptions opt;
  opt.epsilon = c.run.squeeze_epsilon;
  SqueezeReport rep;
  if (!c.inputs.reduced.empty()) {
    const ReducedModel r = read_reduced(fs::path(c.inputs.reduced));
    rep = controlled_squeeze(r, sigma_or_fail(c), c.run.gain, opt);
  } else {
    rep = controlled_squeeze(c.run.gain, opt);
  }
  std::vector<std::vector<double>> cols{rep.times};
  std::vector<std::string> names{"t", "gamma_z1", "gamma_z2", "gamma_z3"};
  for (std::size_t m = 0; m < rep.initial.size(); ++m) cols.push_back(column(rep.paths, m));
  write_columns(ctx.dir / "squeeze.dat", names, cols);
  ctx.results["gain"] = rep.gain;
  ctx.results["holds"] = rep.holds;
  ctx.results["spread"] = rep.spread;
  ctx.results["worst_offset"] = rep.worst_offset;
  ctx.results["reversal_error_t2"] = rep.reversal_error_2;
  ctx.results["reversal_error_t4"] = rep.reversal_error_4;
  ctx.results["closed_form_error"] = rep.closed_form_error;
  ctx.results["nondegenerate"] = rep.nondegenerate;
}

using Handler = void (*)(Context&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> table{
      {"pulse", cmd_pulse},
      {"coeffs", cmd_coeffs},
      {"reduced-sim", cmd_reduced_sim},
      {"lyapunov", cmd_lyapunov},
      {"density", cmd_density},
      {"sync-scan", cmd_sync_scan},
      {"spde-two-pulse", cmd_spde_two_pulse},
      {"reduced-vs-full", cmd_reduced_vs_full},
      {"squeeze-demo", cmd_squeeze},
  };
  return table;
}

std::string versions() {
  return "pulsesync 0.1.0; " + fft_backend_version() + "; Eigen " +
         std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : handlers()) out.push_back(name);
    return out;
  }();
  return names;
}

int run_command(const std::string& command, const Config& config, std::ostream& log) {
  const auto& table = handlers();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const auto& e) { return e.first == command; });
  if (it == table.end()) {
    log << "error: unknown command '" << command << "'\n";
    return ExitCode::validation;
  }
  if (!config.command.empty() && config.command != command) {
    log << "error: config field 'command' is '" << config.command << "' but '" << command
        << "' was requested\n";
    return ExitCode::validation;
  }

  Config cfg = config;
  cfg.command = command;
  Context ctx{cfg, fs::path(cfg.output), log};
  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec) {
    log << "error: cannot create output directory '" << cfg.output << "': " << ec.message()
        << "\n";
    return ExitCode::validation;
  }
  fs::remove(ctx.dir / "FAILED", ec);

  const auto start = std::chrono::steady_clock::now();
  int code = ExitCode::ok;
  std::string status = "ok", message;
  try {
    it->second(ctx);
    if (ctx.censored) {
      code = ExitCode::censored;
      status = "censored";
    }
  } catch (const ValidationError& e) {
    code = ExitCode::validation;
    status = "failed";
    message = e.what();
  } catch (const NumericalError& e) {
    code = ExitCode::numerical;
    status = "failed";
    message = e.what();
  } catch (const std::exception& e) {
    code = ExitCode::numerical;
    status = "failed";
    message = e.what();
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json prov = {{"command", command},   {"config", cfg.to_json()}, {"versions", versions()},
               {"wall_time_s", wall},  {"status", status},        {"exit_code", code},
               {"seeds", ctx.seeds},   {"results", ctx.results}};
  if (!message.empty()) prov["error"] = message;
  std::ofstream(ctx.dir / "provenance.json") << prov.dump(2) << "\n";
  if (status == "failed") {
    std::ofstream(ctx.dir / "FAILED") << message << "\n";
    log << "error: " << message << "\n";
  }
  return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pulsesync: traveling pulses under periodic multiplicative noise"};
  app.require_subcommand(1);
  std::string config_path, output;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "JSON experiment config");
    sub->add_option("-o,--output", output, "output directory (overrides the config)");
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? ExitCode::ok : ExitCode::validation;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  Config cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::validation;
  }
  if (!output.empty()) cfg.output = output;
  const int code = run_command(command, cfg, out);
  if (code != ExitCode::ok) err << command << ": exit " << code << "\n";
  return code;
}

}  // namespace pulsesync::cli
