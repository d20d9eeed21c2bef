#pragma once

#include "lagp/alc.hpp"
#include "lagp/benchmarks.hpp"
#include "lagp/blhs.hpp"
#include "lagp/csv.hpp"
#include "lagp/error.hpp"
#include "lagp/experiments.hpp"
#include "lagp/gp.hpp"
#include "lagp/kernel.hpp"
#include "lagp/local_design.hpp"
#include "lagp/metrics.hpp"
#include "lagp/mle.hpp"
#include "lagp/neighbors.hpp"
#include "lagp/optimize.hpp"
#include "lagp/parallel.hpp"
#include "lagp/path_design.hpp"
#include "lagp/pipeline.hpp"
#include "lagp/random.hpp"
