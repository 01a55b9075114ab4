#pragma once

#include "regen/bounds.hpp"
#include "regen/chain_models.hpp"
#include "regen/common.hpp"
#include "regen/formulas.hpp"
#include "regen/io.hpp"
#include "regen/orlicz.hpp"
#include "regen/parallel.hpp"
#include "regen/rng.hpp"
#include "regen/split_regen.hpp"
#include "regen/stats.hpp"
#include "regen/variance.hpp"
#include "regen/verify.hpp"
