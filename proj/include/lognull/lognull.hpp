#pragma once

#include "lognull/errors.hpp"
#include "lognull/graph.hpp"
#include "lognull/io.hpp"
#include "lognull/lfr.hpp"
#include "lognull/louvain.hpp"
#include "lognull/metrics.hpp"
#include "lognull/null_models.hpp"
#include "lognull/stats.hpp"
#include "lognull/strategies.hpp"
