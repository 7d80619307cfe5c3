#pragma once

#include "mpsent/bnk/calibration.hpp"
#include "mpsent/bnk/impact.hpp"
#include "mpsent/bnk/path.hpp"
#include "mpsent/bnk/signs.hpp"
#include "mpsent/bnk/stable_mode.hpp"
