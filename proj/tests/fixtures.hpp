#pragma once

#include "pulsesync/isochron.hpp"
#include "pulsesync/model.hpp"
#include "pulsesync/pulse.hpp"
#include "pulsesync/reduction.hpp"

namespace fixtures {

/// FHN defaults with g = (constant + linear u, 0).
pulsesync::ModelSpec fhn(double constant = 1.0, double linear = 0.0);

/// Default pulse on L = 16, N = 512, computed once per process.
const pulsesync::PulseSolution& pulse();
const pulsesync::IsochronMap& isochron();

/// Reduced model of the default pulse with g = 1 + 0.5 u, K = 1 and
/// alpha = (0.5, 0.3, 1.0); pairings and Q computed once per process.
const pulsesync::ReducedModel& reduced_inhomogeneous();

/// Same pulse, g = 1, homogeneous alpha = (1, 0, 1).
const pulsesync::ReducedModel& reduced_homogeneous();

/// Hand-made pairings with O(1) coefficients, for tests of the torus
/// machinery that should not depend on the PDE.
pulsesync::ReducedModel synthetic_reduced(double speed = 0.0);

}  // namespace fixtures
