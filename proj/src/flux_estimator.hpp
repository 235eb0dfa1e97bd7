#pragma once

#include "inverter.hpp"
#include "motor.hpp"

namespace limsim {

// Stator flux integral per axis: lam = integral of (V - i*Rs) dt.
struct EstimatorState {
    double lam_as = 0.0;
    double lam_bs = 0.0;
};

struct FluxEstimate {
    double lam_ar_hat = 0.0;
    double lam_br_hat = 0.0;
};

// One rectangular (forward) integration step at the control period.
inline EstimatorState update(const EstimatorState &est,
                             const VoltageAlphaBeta &V, double i_as,
                             double i_bs, double Rs, double dt) {
    return {est.lam_as + dt * (V.V_as - i_as * Rs),
            est.lam_bs + dt * (V.V_bs - i_bs * Rs)};
}

// Secondary flux from the stator flux integral:
//   lam_r = (Lr/Lm) * (lam_s - sigma*Ls*i)
inline FluxEstimate secondary_flux(const EstimatorState &est, double i_as,
                                   double i_bs, const MotorParams &p,
                                   const DerivedParams &d) {
    const double g = p.Lr / p.Lm;
    return {g * (est.lam_as - d.sigma * p.Ls * i_as),
            g * (est.lam_bs - d.sigma * p.Ls * i_bs)};
}

// Stator flux consistent with a motor state; used to initialize the
// estimator from the scenario's initial plant state (inverse of the
// secondary-flux relation).
inline EstimatorState consistent_init(const MotorState &s,
                                      const MotorParams &p,
                                      const DerivedParams &d) {
    return {d.sigma * p.Ls * s.i_as + p.Lm / p.Lr * s.lam_ar,
            d.sigma * p.Ls * s.i_bs + p.Lm / p.Lr * s.lam_br};
}

} // namespace limsim
