#ifndef SWISS_SWISS_HPP_
#define SWISS_SWISS_HPP_

#include "swiss/graph.hpp"
#include "swiss/cycle_search.hpp"
#include "swiss/schedule.hpp"
#include "swiss/lyapunov.hpp"
#include "swiss/psi.hpp"
#include "swiss/dynamics.hpp"
#include "swiss/sim.hpp"
#include "swiss/config.hpp"
#include "swiss/cli.hpp"

#endif  // SWISS_SWISS_HPP_
