#pragma once

#include "sine/aco.hpp"
#include "sine/backbone.hpp"
#include "sine/bench.hpp"
#include "sine/error.hpp"
#include "sine/instance.hpp"
#include "sine/objective.hpp"
#include "sine/partition.hpp"
#include "sine/report_io.hpp"
#include "sine/solver.hpp"
#include "sine/stats.hpp"
#include "sine/svg.hpp"
#include "sine/tour.hpp"
