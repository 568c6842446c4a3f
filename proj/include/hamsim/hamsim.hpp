#pragma once

// Umbrella header: pulls in the whole library.

#include "hamsim/cli.hpp"
#include "hamsim/coo.hpp"
#include "hamsim/evolve_hermitian.hpp"
#include "hamsim/evolve_psd.hpp"
#include "hamsim/exact.hpp"
#include "hamsim/families.hpp"
#include "hamsim/io.hpp"
#include "hamsim/numeric.hpp"
#include "hamsim/oracle.hpp"
#include "hamsim/parallel.hpp"
#include "hamsim/pinv.hpp"
#include "hamsim/plan.hpp"
#include "hamsim/prefix_weights.hpp"
#include "hamsim/sampler.hpp"
#include "hamsim/series.hpp"
#include "hamsim/shift.hpp"
#include "hamsim/sketch_common.hpp"
#include "hamsim/sketch_hermitian.hpp"
#include "hamsim/sketch_psd.hpp"
#include "hamsim/sparse.hpp"
#include "hamsim/state_handle.hpp"
#include "hamsim/types.hpp"
