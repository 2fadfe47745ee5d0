#pragma once

#include "she/errors.hpp"
#include "she/special_functions.hpp"
#include "she/quadrature.hpp"
#include "she/initial_data.hpp"
#include "she/measure_parse.hpp"
#include "she/moment_kernels.hpp"
#include "she/moment_calculus.hpp"
#include "she/picard.hpp"
#include "she/growth_analysis.hpp"
#include "she/rng.hpp"
#include "she/spde_simulator.hpp"
#include "she/io.hpp"
#include "she/validation.hpp"
