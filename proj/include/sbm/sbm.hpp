#pragma once

#include "sbm/asymptotics.hpp"
#include "sbm/backtest.hpp"
#include "sbm/blocks.hpp"
#include "sbm/error.hpp"
#include "sbm/frechet.hpp"
#include "sbm/io.hpp"
#include "sbm/marshall_olkin.hpp"
#include "sbm/parallel.hpp"
#include "sbm/quadrature.hpp"
#include "sbm/returnlevel.hpp"
#include "sbm/rng.hpp"
#include "sbm/simulate.hpp"
#include "sbm/special.hpp"

namespace sbm {
inline constexpr const char* version = "0.1.0";
}
