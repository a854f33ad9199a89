#pragma once

#include "frenetsim/error.hpp"
#include "frenetsim/numerics.hpp"
#include "frenetsim/curve_model.hpp"
#include "frenetsim/similarity.hpp"
#include "frenetsim/signature.hpp"
#include "frenetsim/indicatrix.hpp"
#include "frenetsim/shape_invariants.hpp"
#include "frenetsim/special_curves.hpp"
#include "frenetsim/io.hpp"
