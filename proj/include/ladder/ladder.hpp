#pragma once

#include "ladder/config.hpp"
#include "ladder/core.hpp"
#include "ladder/effective.hpp"
#include "ladder/errors.hpp"
#include "ladder/experiments.hpp"
#include "ladder/metrics.hpp"
#include "ladder/output.hpp"
#include "ladder/parallel.hpp"
#include "ladder/propagator.hpp"
#include "ladder/random.hpp"
#include "ladder/runner.hpp"
#include "ladder/signal.hpp"
