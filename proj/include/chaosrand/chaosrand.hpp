#pragma once

#include "chaosrand/error.hpp"
#include "chaosrand/fixed_point.hpp"
#include "chaosrand/lfsr.hpp"
#include "chaosrand/logistic.hpp"
#include "chaosrand/pendulum.hpp"
#include "chaosrand/entropy.hpp"
#include "chaosrand/special_functions.hpp"
#include "chaosrand/stats.hpp"
#include "chaosrand/generators.hpp"
#include "chaosrand/bench.hpp"
#include "chaosrand/compare.hpp"
#include "chaosrand/run_config.hpp"
