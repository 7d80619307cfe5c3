#pragma once

#include "mpsent/synth/taylor_dgp.hpp"
#include "mpsent/synth/var_dgp.hpp"
