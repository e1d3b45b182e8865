#pragma once

// Umbrella header.

#include "dgbn/benchmark.hpp"
#include "dgbn/csv.hpp"
#include "dgbn/decision_graph.hpp"
#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/math.hpp"
#include "dgbn/node_evaluator.hpp"
#include "dgbn/operators.hpp"
#include "dgbn/parent_space.hpp"
#include "dgbn/rng.hpp"
#include "dgbn/sampling.hpp"
#include "dgbn/scoring.hpp"
#include "dgbn/search.hpp"
#include "dgbn/serialize.hpp"
#include "dgbn/structure.hpp"
#include "dgbn/sweep.hpp"
#include "dgbn/table_score.hpp"
#include "dgbn/value_set.hpp"
