#pragma once

#include "inverter.hpp"
#include "motor.hpp"

namespace limsim {

struct DtcConfig {
    double Kp = 0.0;          // PI proportional gain [N/(m/s)]
    double Ki = 0.0;          // PI integral gain [N/m]
    double flux_ref = 0.15;   // stator flux magnitude reference [Wb]
    double flux_band = 0.003; // flux hysteresis half-width [Wb]
    double force_band = 12.0; // force hysteresis half-width [N]
    double force_limit = 1000.0; // PI output clamp [N]
};

struct DtcState {
    double pi_integral = 0.0;
    int flux_comparator = 1;  // 1 = raise flux, 0 = lower flux
    int force_comparator = 0; // +1 / 0 / -1
};

// PI gains from pole placement on the mechanical model (double pole, ~0.1 s
// settling), flux reference sized for the rated load with voltage headroom.
DtcConfig default_dtc_config(const MotorParams &p, const DerivedParams &d);

void validate_dtc_config(const DtcConfig &cfg);

// Sector (1..6) of the stator flux angle; 60-degree sectors centered on
// 0, 60, ... degrees, boundary angles assigned to the lower sector.
// Zero flux maps to sector 1.
int sector(double lam_as, double lam_bs);

// One hysteresis-table step. Inputs are the measured speed, the stator
// flux estimate, the electromagnetic force estimate and the current
// speed reference.
SwitchState dtc_step(double v, double lam_as, double lam_bs, double Fe_est,
                     double w_now, DtcState &state, const DtcConfig &cfg,
                     double Ts);

// The switching table itself, exposed for the symmetry self-test:
// (flux_comparator, force_comparator, sector) -> switch state.
SwitchState dtc_table(int flux_cmp, int force_cmp, int sec);

} // namespace limsim
