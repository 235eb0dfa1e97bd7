#include "inverter.hpp"

#include <cmath>

namespace limsim {

VoltageAlphaBeta voltage(SwitchState u, const InverterParams &inv) {
    const double sqrt3_2 = std::sqrt(3.0) / 2.0;
    VoltageAlphaBeta v;
    v.V_as = inv.Vdc * (u.u1 - 0.5 * u.u2 - 0.5 * u.u3);
    v.V_bs = inv.Vdc * sqrt3_2 * (static_cast<double>(u.u3) - u.u2);
    return v;
}

std::array<double, 3> phase_voltages(SwitchState u, const InverterParams &inv) {
    return {inv.Vdc * (u.u1 - 0.5), inv.Vdc * (u.u2 - 0.5),
            inv.Vdc * (u.u3 - 0.5)};
}

} // namespace limsim
