#pragma once

#include "coarsekit/coarse.hpp"
#include "coarsekit/coarsening.hpp"
#include "coarsekit/complexes.hpp"
#include "coarsekit/decomposition.hpp"
#include "coarsekit/kgroups.hpp"
#include "coarsekit/roe.hpp"
#include "coarsekit/spaces.hpp"
