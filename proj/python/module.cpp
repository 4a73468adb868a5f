#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pulsesync/errors.hpp"
#include "pulsesync/io.hpp"
#include "pulsesync/isochron.hpp"
#include "pulsesync/measure.hpp"
#include "pulsesync/model.hpp"
#include "pulsesync/phase.hpp"
#include "pulsesync/pulse.hpp"
#include "pulsesync/reduction.hpp"
#include "pulsesync/rng.hpp"
#include "pulsesync/spde.hpp"
#include "pulsesync/squeeze.hpp"
#include "pulsesync/torus.hpp"

namespace py = pybind11;
using namespace pulsesync;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const FieldState& f) {
  Array out({f.components(), f.points()});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

FieldState from_array(const Array& a, const Grid1D& grid) {
  if (a.ndim() != 2 || a.shape(1) != grid.points())
    throw ValidationError("field array must have shape (components, N)");
  FieldState f(grid, static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), f.values().begin());
  return f;
}

Array evaluate(const TrigSeries& s, const Array& x) {
  Array out(x.request().shape);
  for (py::ssize_t i = 0; i < x.size(); ++i) out.mutable_data()[i] = s(x.data()[i]);
  return out;
}

Array matrix(const std::vector<std::vector<double>>& rows) {
  const py::ssize_t n = static_cast<py::ssize_t>(rows.size());
  const py::ssize_t m = n ? static_cast<py::ssize_t>(rows[0].size()) : 0;
  Array out({n, m});
  for (py::ssize_t i = 0; i < n; ++i) std::copy(rows[i].begin(), rows[i].end(), out.mutable_data() + i * m);
  return out;
}

}  // namespace

PYBIND11_MODULE(_pulsesync, m) {
  m.doc() = "Traveling pulses under periodic multiplicative noise";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<NoPulseError>(m, "NoPulseError", numerical.ptr());
  py::register_exception<OffManifoldError>(m, "OffManifoldError", numerical.ptr());
  py::register_exception<LeftBasinError>(m, "LeftBasinError", numerical.ptr());
  py::register_exception<BlowUpError>(m, "BlowUpError", numerical.ptr());
  py::register_exception<DegenerateGeneratorError>(m, "DegenerateGeneratorError", numerical.ptr());

  py::class_<Grid1D>(m, "Grid")
      .def(py::init<int, int>(), py::arg("length"), py::arg("points"))
      .def_property_readonly("length", &Grid1D::length)
      .def_property_readonly("points", &Grid1D::points)
      .def_property_readonly("spacing", &Grid1D::spacing);

  py::class_<ModelSpec>(m, "Model")
      .def_readonly("name", &ModelSpec::name)
      .def_readonly("components", &ModelSpec::components)
      .def_readonly("parameters", &ModelSpec::parameters);

  m.def(
      "fitzhugh_nagumo",
      [](double nu, double a, double epsilon, double gamma, double g_constant, double g_linear) {
        return fitzhugh_nagumo({nu, a, epsilon, gamma}, {g_constant, g_linear});
      },
      py::arg("nu") = 0.04, py::arg("a") = 0.1, py::arg("epsilon") = 0.01, py::arg("gamma") = 4.0,
      py::arg("g_constant") = 1.0, py::arg("g_linear") = 0.0);

  py::class_<PulseSolution>(m, "Pulse")
      .def_property_readonly("profile", [](const PulseSolution& p) { return to_array(p.profile); })
      .def_property_readonly("derivative", [](const PulseSolution& p) { return to_array(p.derivative); })
      .def_property_readonly("adjoint", [](const PulseSolution& p) { return to_array(p.adjoint); })
      .def_property_readonly("grid", &PulseSolution::grid)
      .def_readonly("speed", &PulseSolution::speed)
      .def_readonly("bvp_residual", &PulseSolution::bvp_residual)
      .def_readonly("adjoint_residual", &PulseSolution::adjoint_residual)
      .def_readonly("normalization", &PulseSolution::normalization)
      .def_readonly("zero_eigenvalue", &PulseSolution::zero_eigenvalue)
      .def_readonly("near_zero_count", &PulseSolution::near_zero_count)
      .def_readonly("eigenvector_cosine", &PulseSolution::eigenvector_cosine)
      .def_readonly("a_gap", &PulseSolution::a_gap)
      .def_readonly("newton_iterations", &PulseSolution::newton_iterations);

  m.def(
      "find_pulse",
      [](const ModelSpec& model, int length, int points, double warmup) {
        const auto [guess, speed] = simulated_pulse_guess(model, Grid1D(length, points), warmup);
        return find_pulse(model, guess, speed);
      },
      py::arg("model"), py::arg("length") = 16, py::arg("points") = 512, py::arg("warmup") = 400.0,
      "Simulated initial guess followed by Newton's method on the travelling-wave problem.");
  m.def("read_pulse", [](const std::filesystem::path& p) { return read_pulse(p); });
  m.def("write_pulse", [](const std::filesystem::path& p, const PulseSolution& s) { write_pulse(p, s); });

  m.def(
      "phase_fit",
      [](const Array& w, const PulseSolution& pulse) {
        const PhaseFit f = phase_fit(from_array(w, pulse.grid()), pulse);
        return py::dict(py::arg("phase") = f.phase, py::arg("tube_distance") = f.tube_distance,
                        py::arg("curvature") = f.curvature);
      },
      py::arg("field"), py::arg("pulse"));

  py::class_<IsochronMap>(m, "IsochronMap")
      .def(py::init([](const PulseSolution& pulse, const ModelSpec& model, double t_relax, double dt,
                       bool extrapolate) {
             IsochronOptions o;
             o.t_relax = t_relax;
             o.dt = dt;
             o.extrapolate = extrapolate;
             return IsochronMap(pulse, model, o);
           }),
           py::arg("pulse"), py::arg("model"), py::arg("t_relax") = 300.0, py::arg("dt") = 0.01,
           py::arg("extrapolate") = false)
      .def("__call__", [](const IsochronMap& pi, const Array& v) {
        return pi(from_array(v, pi.profile().grid()));
      });

  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def(py::init<int, std::vector<double>, double>(), py::arg("K"), py::arg("alpha"),
           py::arg("sigma") = 0.1)
      .def_readonly("K", &NoiseSpec::K)
      .def_readonly("alpha", &NoiseSpec::alpha)
      .def_readonly("sigma", &NoiseSpec::sigma)
      .def("homogeneous", &NoiseSpec::homogeneous);

  py::class_<PairingSet>(m, "Pairings")
      .def(py::init<>())
      .def_readwrite("K", &PairingSet::K)
      .def_readwrite("c", &PairingSet::c)
      .def_readwrite("d", &PairingSet::d)
      .def_readwrite("q", &PairingSet::q)
      .def_readwrite("psi_g_norm2", &PairingSet::psi_g_norm2);

  m.def("fourier_pairings", &fourier_pairings, py::arg("pulse"), py::arg("model"), py::arg("K"));

  py::class_<ReducedModel>(m, "ReducedModel")
      .def_readwrite("speed", &ReducedModel::speed)
      .def_readonly("noise", &ReducedModel::noise)
      .def_readonly("pairings", &ReducedModel::pairings)
      .def("a", [](const ReducedModel& r, const Array& x) { return evaluate(r.a, x); })
      .def("strat", [](const ReducedModel& r, const Array& x) { return evaluate(r.strat, x); })
      .def("b", [](const ReducedModel& r, int k, const Array& x) { return evaluate(r.b_at(k), x); });

  m.def("build_reduced", &build_reduced, py::arg("speed"), py::arg("noise"), py::arg("pairings"));
  m.def(
      "reduce",
      [](const PulseSolution& pulse, const ModelSpec& model, const NoiseSpec& noise, double q_eps,
         bool extrapolate) {
        PairingSet pr = fourier_pairings(pulse, model, noise.K);
        const NondegeneracyReport nd = nondegeneracy_check(noise, pr);
        if (!nd.passed) throw ValidationError(nd.reason);
        IsochronOptions o;
        o.extrapolate = extrapolate;
        const IsochronMap pi(pulse, model, o);
        q_matrix(pr, pi, model, q_eps,
                 [&](int k) { return noise.alpha_at(k) == 0.0 && noise.alpha_at(-k) == 0.0; });
        return build_reduced(pulse.speed, noise, pr);
      },
      py::arg("pulse"), py::arg("model"), py::arg("noise"), py::arg("q_eps") = 1e-3,
      py::arg("extrapolate") = false,
      "Pairings, second variation of the isochron map and the reduced coefficients.");
  m.def("read_reduced", [](const std::filesystem::path& p) { return read_reduced(p); });
  m.def("write_reduced", [](const std::filesystem::path& p, const ReducedModel& r) { write_reduced(p, r); });

  m.def("default_dt", &default_dt, py::arg("reduced"), py::arg("sigma"), py::arg("cap") = 1e-3);
  m.def(
      "simulate",
      [](const ReducedModel& r, double sigma, std::vector<double> initial, double duration,
         std::uint64_t seed, double dt, const std::string& scheme, long stride) {
        if (scheme != "ito" && scheme != "stratonovich")
          throw ValidationError("scheme must be 'ito' or 'stratonovich'");
        if (dt <= 0.0) dt = default_dt(r, sigma);
        SimulationOptions o;
        o.scheme = scheme == "ito" ? Scheme::ito_euler : Scheme::stratonovich_heun;
        o.stride = stride;
        TorusEnsemble e(std::move(initial));
        Trajectory t;
        {
          py::gil_scoped_release release;
          t = simulate(r, sigma, e, NoisePath(seed, r.noise.K, dt), duration, o);
        }
        return py::make_tuple(py::array(py::cast(t.times)), matrix(t.lifts), t.order_violations);
      },
      py::arg("reduced"), py::arg("sigma"), py::arg("initial"), py::arg("duration"),
      py::arg("seed") = 1, py::arg("dt") = 0.0, py::arg("scheme") = "ito", py::arg("stride") = 100,
      "Shared-noise ensemble; returns (times, lifts[record, member], order_violations).");
  m.def(
      "sync_time",
      [](const ReducedModel& r, double sigma, double x0, double y0, double threshold,
         double horizon, std::uint64_t seed, double dt) {
        if (dt <= 0.0) dt = default_dt(r, sigma);
        py::gil_scoped_release release;
        const SyncResult s = sync_time(r, sigma, x0, y0, threshold, NoisePath(seed, r.noise.K, dt), horizon);
        return std::make_pair(s.time, s.censored);
      },
      py::arg("reduced"), py::arg("sigma"), py::arg("x0"), py::arg("y0"), py::arg("threshold") = 1e-2,
      py::arg("horizon") = 1e4, py::arg("seed") = 1, py::arg("dt") = 0.0);
  m.def(
      "tangent_lyapunov",
      [](const ReducedModel& r, double sigma, double duration, double burn_in, std::uint64_t seed,
         double dt, int batches) {
        if (dt <= 0.0) dt = default_dt(r, sigma);
        py::gil_scoped_release release;
        const LyapunovEstimate e =
            tangent_lyapunov_mc(r, sigma, 0.0, NoisePath(seed, r.noise.K, dt), duration, burn_in, batches);
        return std::make_pair(e.lambda, e.stderr_);
      },
      py::arg("reduced"), py::arg("sigma"), py::arg("duration"), py::arg("burn_in") = 0.0,
      py::arg("seed") = 1, py::arg("dt") = 0.0, py::arg("batches") = 50);

  m.def(
      "stationary_density",
      [](const ReducedModel& r, double sigma, int n) {
        const StationaryDensity d = stationary_density(r, sigma, n);
        return py::dict(py::arg("x") = d.x, py::arg("p") = d.p, py::arg("residual") = d.residual,
                        py::arg("integral") = d.integral, py::arg("flux") = d.flux);
      },
      py::arg("reduced"), py::arg("sigma"), py::arg("n") = 256);
  m.def(
      "lyapunov_analytic",
      [](const ReducedModel& r, double sigma, int n) {
        const LyapunovAnalytic l = lyapunov_analytic(r, sigma, stationary_density(r, sigma, n));
        return std::make_pair(l.lambda_a, l.lambda_b);
      },
      py::arg("reduced"), py::arg("sigma"), py::arg("n") = 256);
  m.def(
      "generator_gap", [](const ReducedModel& r, double sigma, int n) { return generator_gap(r, sigma, n).gap; },
      py::arg("reduced"), py::arg("sigma"), py::arg("n") = 256);

  m.def(
      "controlled_squeeze",
      [](double gain, double epsilon) {
        SqueezeOptions o;
        o.epsilon = epsilon;
        const SqueezeReport r = controlled_squeeze(gain, o);
        return py::dict(py::arg("times") = r.times, py::arg("paths") = matrix(r.paths),
                        py::arg("spread") = r.spread, py::arg("holds") = r.holds,
                        py::arg("reversal_error") = r.reversal_error_2,
                        py::arg("closed_form_error") = r.closed_form_error);
      },
      py::arg("gain"), py::arg("epsilon") = 0.05);

  m.def(
      "two_pulse",
      [](const PulseSolution& pulse, const ModelSpec& model, const NoiseSpec& noise, double sigma,
         double x0, double y0, double horizon, std::uint64_t seed, double dt, double checkpoint) {
        SpdeOptions o;
        o.dt = dt;
        o.checkpoint = checkpoint;
        TwoPulseReport r;
        {
          py::gil_scoped_release release;
          r = two_pulse_experiment(pulse, model, noise, sigma, x0, y0, horizon, seed, o);
        }
        std::vector<std::vector<double>> rows;
        for (const auto& c : r.checkpoints)
          rows.push_back({c.t, c.phase_u, c.phase_v, c.tube_u, c.tube_v, c.distance, c.discrepancy});
        return py::dict(py::arg("columns") = std::vector<std::string>{"t", "phase_u", "phase_v", "tube_u",
                                                                     "tube_v", "distance", "discrepancy"},
                        py::arg("checkpoints") = matrix(rows), py::arg("censored") = r.censored,
                        py::arg("censor_reason") = r.censor_reason);
      },
      py::arg("pulse"), py::arg("model"), py::arg("noise"), py::arg("sigma"), py::arg("x0"),
      py::arg("y0"), py::arg("horizon"), py::arg("seed") = 1, py::arg("dt") = 0.01,
      py::arg("checkpoint") = -1.0);
}
