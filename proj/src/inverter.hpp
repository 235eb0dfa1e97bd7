#pragma once

#include <array>
#include <cstdint>

namespace limsim {

// One leg configuration of the two-level three-phase inverter.
struct SwitchState {
    uint8_t u1 = 0;
    uint8_t u2 = 0;
    uint8_t u3 = 0;

    friend constexpr bool operator==(SwitchState a, SwitchState b) {
        return a.u1 == b.u1 && a.u2 == b.u2 && a.u3 == b.u3;
    }
    friend constexpr bool operator!=(SwitchState a, SwitchState b) {
        return !(a == b);
    }
};

struct InverterParams {
    double Vdc = 255.0; // DC link voltage [V]
};

struct VoltageAlphaBeta {
    double V_as = 0.0;
    double V_bs = 0.0;
};

// The canonical enumeration of the 8 switch combinations. This ordering
// defines the index 1..8 used by the transition-count table and by the
// controller's deterministic tie-breaking.
inline constexpr std::array<SwitchState, 8> kSwitchStates = {{
    {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0},
    {0, 1, 1}, {1, 0, 1}, {0, 0, 0}, {1, 1, 1},
}};

constexpr const std::array<SwitchState, 8> &enumerate_states() {
    return kSwitchStates;
}

// Number of legs that toggle between two switch states (Hamming distance).
constexpr int switch_count(SwitchState prev, SwitchState next) {
    return (prev.u1 != next.u1) + (prev.u2 != next.u2) + (prev.u3 != next.u3);
}

// Stationary-frame voltage produced by a switch state:
//   V_as = Vdc * (u1 - u2/2 - u3/2)
//   V_bs = Vdc * (sqrt(3)/2) * (u3 - u2)
VoltageAlphaBeta voltage(SwitchState u, const InverterParams &inv);

// Per-leg pole voltage, +-Vdc/2. Trace output only.
std::array<double, 3> phase_voltages(SwitchState u, const InverterParams &inv);

// Literal transition-count table (row = previous state, column = next
// state, both in kSwitchStates order). Kept alongside the Hamming formula
// so the two representations can be checked against each other.
inline constexpr std::array<std::array<int, 8>, 8> kSwitchCountTable = {{
    {0, 2, 2, 1, 3, 1, 1, 2},
    {2, 0, 2, 1, 1, 3, 1, 2},
    {2, 2, 0, 3, 1, 1, 1, 2},
    {1, 1, 3, 0, 2, 2, 2, 1},
    {3, 1, 1, 2, 0, 2, 2, 1},
    {1, 3, 1, 2, 2, 0, 2, 1},
    {1, 1, 1, 2, 2, 2, 0, 3},
    {2, 2, 2, 1, 1, 1, 3, 0},
}};

constexpr bool switch_table_matches_hamming() {
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (kSwitchCountTable[i][j] !=
                switch_count(kSwitchStates[i], kSwitchStates[j]))
                return false;
    return true;
}
static_assert(switch_table_matches_hamming(),
              "transition-count table out of sync with Hamming distance");

} // namespace limsim
