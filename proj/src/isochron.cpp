#include "pulsesync/isochron.hpp"

#include <cmath>

#include "pulsesync/errors.hpp"
#include "pulsesync/evolve.hpp"

namespace pulsesync {

namespace {

double centred(double x, double period) { return x - period * std::round(x / period); }

}  // namespace

IsochronMap::IsochronMap(const PulseSolution& pulse, ModelSpec model, IsochronOptions options)
    : model_(std::move(model)), fitter_(pulse.profile), options_(options) {
  delta_tube_ = options_.delta_tube > 0.0 ? options_.delta_tube : 0.1 * norm(pulse.profile);
  if (step_count(options_.t_relax, options_.dt) < 1)
    throw ValidationError("isochron relaxation time must be positive");
  reference_ = relaxed_lift(pulse.profile, options_.dt);
  if (options_.extrapolate) reference_half_ = relaxed_lift(pulse.profile, 0.5 * options_.dt);
}

double IsochronMap::relaxed_lift(const FieldState& v, double dt) const {
  const long steps = step_count(options_.t_relax, dt);
  const long stride = std::max(1L, std::lround(options_.checkpoint / dt));
  const double len = v.grid().length();
  PhaseFit fit = fitter_.fit(v);
  if (fit.tube_distance > delta_tube_)
    throw LeftBasinError("initial state is outside the pulse tube", fit.tube_distance);
  double lift = centred(fit.phase, len);
  double last = fit.phase;

  EtdStepper stepper(model_, v.grid(), dt);
  FieldState u = v;
  for (long s = 1; s <= steps; ++s) {
    stepper.step(u);
    if (s % stride != 0 && s != steps) continue;
    if (!u.all_finite()) throw BlowUpError(s, u.time());
    fit = fitter_.fit(u);
    if (fit.tube_distance > delta_tube_)
      throw LeftBasinError("relaxation left the pulse tube at t = " + std::to_string(s * dt),
                           fit.tube_distance);
    lift += centred(fit.phase - last, len);
    last = fit.phase;
  }
  return lift;
}

double IsochronMap::operator()(const FieldState& v) const {
  if (!v.same_shape(fitter_.profile())) throw ValidationError("isochron map: grid mismatch");
  const double coarse = relaxed_lift(v, options_.dt) - reference_;
  if (!options_.extrapolate) return coarse;
  return 2.0 * (relaxed_lift(v, 0.5 * options_.dt) - reference_half_) - coarse;
}

double IsochronMap::second_variation(const FieldState& v, const FieldState& w, double eps) const {
  if (!(eps > 0.0)) throw ValidationError("second variation step must be positive");
  const FieldState& u = fitter_.profile();
  const FieldState plus = v + w;
  const FieldState minus = v - w;
  const double a = (*this)(u + eps * plus) + (*this)(u - eps * plus);
  const double b = (*this)(u + eps * minus) + (*this)(u - eps * minus);
  return 0.25 * (a - b) / (eps * eps);
}

double isochron_map(const FieldState& v, const PulseSolution& pulse, const ModelSpec& model,
                    double t_relax) {
  IsochronOptions options;
  options.t_relax = t_relax;
  return IsochronMap(pulse, model, options)(v);
}

double second_variation(const PulseSolution& pulse, const ModelSpec& model, const FieldState& v,
                        const FieldState& w, double eps) {
  return IsochronMap(pulse, model).second_variation(v, w, eps);
}

}  // namespace pulsesync
