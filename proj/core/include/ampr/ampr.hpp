#pragma once

#include "ampr/data.hpp"
#include "ampr/errors.hpp"
#include "ampr/moments.hpp"
#include "ampr/quadrature.hpp"
#include "ampr/random.hpp"
#include "ampr/report.hpp"
#include "ampr/resampling.hpp"
#include "ampr/selection.hpp"
#include "ampr/solver.hpp"
#include "ampr/state_evolution.hpp"
#include "ampr/weighted_lasso.hpp"
