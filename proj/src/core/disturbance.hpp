#pragma once

#include "integrator.hpp"
#include "systems.hpp"

namespace roa {

// Post-fault initial condition: flow the fault dynamics (c1 = 0) from the
// pendulum's stable equilibrium for the fault duration c4.
Vec disturbance_ic(const ParamPoint& p, const Tolerance& tol = {1e-12, 1e-14});

// Closed-form solution of the fault dynamics from the same start.
Vec disturbance_ic_closed_form(const ParamPoint& p);

}  // namespace roa
