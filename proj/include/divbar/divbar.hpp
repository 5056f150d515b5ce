#pragma once

// Umbrella header: solvency-constrained optimal dividend policy for a
// diffusion reserve with proportional reinsurance. Closed-form value
// functions and retention control, survival PDE, Monte Carlo path engine,
// and the constrained-barrier decision layer.

#include "divbar/csv.hpp"
#include "divbar/errors.hpp"
#include "divbar/hjb.hpp"
#include "divbar/model.hpp"
#include "divbar/parallel.hpp"
#include "divbar/philox.hpp"
#include "divbar/quadrature.hpp"
#include "divbar/rootfind.hpp"
#include "divbar/ruin.hpp"
#include "divbar/simulate.hpp"
#include "divbar/solvency.hpp"
#include "divbar/tridiag.hpp"
