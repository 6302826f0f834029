#pragma once

// Umbrella header: density-ratio estimation between two exponential-family
// samples with exact existence diagnostics, critical-tuning computation,
// regularized fits, and the simulation harness.

#include "kliepkit/errors.hpp"
#include "kliepkit/statmodel.hpp"
#include "kliepkit/losscore.hpp"
#include "kliepkit/lp.hpp"
#include "kliepkit/min_norm_point.hpp"
#include "kliepkit/geometry.hpp"
#include "kliepkit/solvers.hpp"
#include "kliepkit/rng.hpp"
#include "kliepkit/simgen.hpp"
#include "kliepkit/harness.hpp"
#include "kliepkit/plot.hpp"
