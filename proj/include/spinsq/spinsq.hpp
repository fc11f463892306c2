#pragma once

// Umbrella header.
#include "spinsq/types.hpp"
#include "spinsq/dicke.hpp"
#include "spinsq/two_qubit.hpp"
#include "spinsq/initial_state.hpp"
#include "spinsq/channels.hpp"
#include "spinsq/metrics.hpp"
#include "spinsq/oracle.hpp"
#include "spinsq/sweep.hpp"
#include "spinsq/verify.hpp"
