#pragma once

// Umbrella header.

#include "dataset.hpp"
#include "dominance.hpp"
#include "error.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "pca_core.hpp"
#include "rng.hpp"
#include "selection.hpp"
#include "spea2.hpp"
