#pragma once

#include "bioqa/corpus.hpp"
#include "bioqa/features.hpp"
#include "bioqa/metrics.hpp"
#include "bioqa/runner.hpp"
#include "bioqa/selection.hpp"
#include "bioqa/stats.hpp"
#include "bioqa/textproc.hpp"
#include "bioqa/tiler.hpp"
