#pragma once

#include "mpsent/text/agreement.hpp"
#include "mpsent/text/indices.hpp"
#include "mpsent/text/lexicon.hpp"
