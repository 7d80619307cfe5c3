#pragma once

#include "mpsent/svar/analysis.hpp"
#include "mpsent/svar/identify.hpp"
#include "mpsent/svar/posterior.hpp"
#include "mpsent/svar/var.hpp"
