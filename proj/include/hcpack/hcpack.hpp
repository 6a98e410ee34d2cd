#pragma once

#include "hcpack/bounds.hpp"
#include "hcpack/boxes.hpp"
#include "hcpack/gen.hpp"
#include "hcpack/geometry.hpp"
#include "hcpack/grid.hpp"
#include "hcpack/io.hpp"
#include "hcpack/knapsack.hpp"
#include "hcpack/lp.hpp"
#include "hcpack/magnitude.hpp"
#include "hcpack/nfdh.hpp"
#include "hcpack/rational.hpp"
#include "hcpack/render.hpp"
#include "hcpack/strip.hpp"
#include "hcpack/structure.hpp"
