#pragma once

#include "tsnac/baselines.hpp"
#include "tsnac/deadline_adjust.hpp"
#include "tsnac/engine.hpp"
#include "tsnac/expected.hpp"
#include "tsnac/harness.hpp"
#include "tsnac/model.hpp"
#include "tsnac/netcalc.hpp"
#include "tsnac/realistic.hpp"
#include "tsnac/rng.hpp"
#include "tsnac/routing.hpp"
#include "tsnac/scenario.hpp"
#include "tsnac/serialize.hpp"
#include "tsnac/verify.hpp"
