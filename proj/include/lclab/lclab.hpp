#pragma once

#include "error.hpp"
#include "lba.hpp"
#include "grid.hpp"
#include "labels.hpp"
#include "labelings.hpp"
#include "view.hpp"
#include "pi_problem.hpp"
#include "solver.hpp"
#include "tree_lcl.hpp"
#include "tree_types.hpp"
#include "tree_speedup.hpp"
#include "bench.hpp"
