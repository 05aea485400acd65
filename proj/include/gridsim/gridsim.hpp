#pragma once

#include "gridsim/daily_sim.hpp"
#include "gridsim/errors.hpp"
#include "gridsim/grid_model.hpp"
#include "gridsim/inverter.hpp"
#include "gridsim/io.hpp"
#include "gridsim/powerflow.hpp"
#include "gridsim/pv_array.hpp"
#include "gridsim/sequence.hpp"
#include "gridsim/svg.hpp"
