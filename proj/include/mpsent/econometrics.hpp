#pragma once

#include "mpsent/econometrics/bootstrap.hpp"
#include "mpsent/econometrics/gmm.hpp"
#include "mpsent/econometrics/instruments.hpp"
#include "mpsent/econometrics/leakage.hpp"
#include "mpsent/econometrics/projections.hpp"
