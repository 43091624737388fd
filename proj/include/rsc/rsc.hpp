#pragma once

#include "rsc/branching.hpp"
#include "rsc/complex.hpp"
#include "rsc/components.hpp"
#include "rsc/errors.hpp"
#include "rsc/experiments.hpp"
#include "rsc/exploration.hpp"
#include "rsc/generator.hpp"
#include "rsc/io.hpp"
#include "rsc/neighborhood.hpp"
#include "rsc/simplex.hpp"
#include "rsc/stats.hpp"
