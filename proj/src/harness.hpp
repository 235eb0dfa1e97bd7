#pragma once

#include "metrics.hpp"
#include "scenario.hpp"
#include "trace.hpp"

namespace limsim {

struct RunResult {
    Trace trace;
    Metrics metrics;
};

// Runs the closed loop: per tick the controller consumes the measured
// speed, measured currents and the estimated secondary flux, emits one
// switch state, the inverter maps it to voltages and the plant advances
// one Euler step at Ts. Aborts with Error(numeric) on non-finite state.
RunResult run(const Scenario &sc);

} // namespace limsim
