#ifndef HOPLP_HOPLP_HPP
#define HOPLP_HOPLP_HPP

// LP-relaxation MAP inference for binary pairwise models with one
// structured high-order potential.

#include "brute_force.hpp"
#include "cardinality.hpp"
#include "dual.hpp"
#include "edge_selection.hpp"
#include "edge_set.hpp"
#include "elimination.hpp"
#include "experiments.hpp"
#include "generators.hpp"
#include "hop_inference.hpp"
#include "junction_tree.hpp"
#include "model.hpp"
#include "model_io.hpp"
#include "report.hpp"

#endif
