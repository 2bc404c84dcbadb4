#pragma once

#include "gcf/analysis.hpp"
#include "gcf/barriers.hpp"
#include "gcf/cutoff.hpp"
#include "gcf/errors.hpp"
#include "gcf/grid.hpp"
#include "gcf/io.hpp"
#include "gcf/model.hpp"
#include "gcf/profile.hpp"
#include "gcf/solver.hpp"
