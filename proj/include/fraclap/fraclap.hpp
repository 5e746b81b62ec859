#pragma once

#include "fraclap/errors.hpp"
#include "fraclap/exact.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/harness.hpp"
#include "fraclap/kernel.hpp"
#include "fraclap/operator.hpp"
#include "fraclap/solve.hpp"
#include "fraclap/special_functions.hpp"
