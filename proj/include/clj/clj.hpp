#pragma once

// Umbrella header for the confined Lennard-Jones chain library.

#include "clj/cell.hpp"
#include "clj/chain.hpp"
#include "clj/continuum.hpp"
#include "clj/discrete.hpp"
#include "clj/experiment.hpp"
#include "clj/io.hpp"
#include "clj/numerics.hpp"
#include "clj/potentials.hpp"
#include "clj/solver.hpp"
