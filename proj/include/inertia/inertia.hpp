#pragma once

#include "inertia/rational.hpp"
#include "inertia/expr.hpp"
#include "inertia/parse.hpp"
#include "inertia/potentials.hpp"
#include "inertia/determining.hpp"
#include "inertia/lie_algebra.hpp"
#include "inertia/orbit_oracle.hpp"
#include "inertia/ode.hpp"
#include "inertia/jet.hpp"
#include "inertia/reduced_systems.hpp"
#include "inertia/vortex.hpp"
#include "inertia/reports.hpp"
