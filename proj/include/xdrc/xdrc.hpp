#pragma once

#include "xdrc/clusters.hpp"
#include "xdrc/continuum.hpp"
#include "xdrc/coupling.hpp"
#include "xdrc/currents.hpp"
#include "xdrc/decomposition.hpp"
#include "xdrc/errors.hpp"
#include "xdrc/gff.hpp"
#include "xdrc/graph.hpp"
#include "xdrc/io.hpp"
#include "xdrc/ising.hpp"
#include "xdrc/ising_oracle.hpp"
#include "xdrc/lattice.hpp"
#include "xdrc/loewner.hpp"
#include "xdrc/rng.hpp"
#include "xdrc/scaling.hpp"
#include "xdrc/stats.hpp"
