#pragma once

#include "slipt/geometry.hpp"
#include "slipt/vlc_channel.hpp"
#include "slipt/rng.hpp"
#include "slipt/rf_channel.hpp"
#include "slipt/link_budget.hpp"
#include "slipt/feasible_set.hpp"
#include "slipt/dc_solver.hpp"
#include "slipt/reference_oracle.hpp"
