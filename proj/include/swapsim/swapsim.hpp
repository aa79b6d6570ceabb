#pragma once

/// Umbrella header for the swapsim library: a dense statevector simulator of
/// the two-source entanglement-swapping protocol, with projective
/// measurements, reproducible counter-based randomness, CHSH analysis, and
/// the multi-station trial loop.

#include "swapsim/analysis.hpp"
#include "swapsim/common.hpp"
#include "swapsim/density.hpp"
#include "swapsim/eigen.hpp"
#include "swapsim/measurement.hpp"
#include "swapsim/operators.hpp"
#include "swapsim/protocol.hpp"
#include "swapsim/records_io.hpp"
#include "swapsim/rng.hpp"
#include "swapsim/state.hpp"
