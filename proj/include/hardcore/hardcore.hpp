#pragma once

// Everything at once.

#include "hardcore/arith.hpp"
#include "hardcore/dual.hpp"
#include "hardcore/errors.hpp"
#include "hardcore/format.hpp"
#include "hardcore/graph.hpp"
#include "hardcore/graph_io.hpp"
#include "hardcore/mixing.hpp"
#include "hardcore/mobius.hpp"
#include "hardcore/partition.hpp"
#include "hardcore/projective.hpp"
#include "hardcore/saw_tree.hpp"
#include "hardcore/spectral.hpp"
#include "hardcore/tree_ratio.hpp"
#include "hardcore/zeros.hpp"
