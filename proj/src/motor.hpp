#pragma once

#include <cmath>

namespace limsim {

// Electrical and mechanical constants of the machine.
struct MotorParams {
    double Rs = 5.3685;        // primary winding resistance [ohm]
    double Rr = 3.5315;        // secondary resistance [ohm]
    double Ls = 0.02846;       // primary inductance [H]
    double Lr = 0.02846;       // secondary inductance [H]
    double Lm = 0.02419;       // magnetizing inductance [H]
    int np = 4;                // pole pairs
    double h = 0.027;          // pole pitch [m]
    double M = 2.78;           // mover mass [kg]
    double D = 36.0455;        // viscous friction + iron loss [kg/s]
    double Vrated = 180.0;     // rated voltage [V]
    double Irated = 14.2;      // rated current [A]
    double flux_rated = 0.056; // rated secondary flux [Wb]
};

struct DerivedParams {
    double sigma = 0.0; // leakage coefficient, 1 - Lm^2/(Ls*Lr)
    double Tr = 0.0;    // secondary time constant Lr/Rr [s]
    double kf = 0.0;    // force constant 3*np*Lm*pi/(2*Lr*h) [N/(Wb*A)]
};

// The five-dimensional continuous state of the machine.
struct MotorState {
    double i_as = 0.0;   // alpha primary current [A]
    double i_bs = 0.0;   // beta primary current [A]
    double lam_ar = 0.0; // alpha secondary flux [Wb]
    double lam_br = 0.0; // beta secondary flux [Wb]
    double v = 0.0;      // mover velocity [m/s]
};

struct PlantInput {
    double V_as = 0.0; // alpha primary voltage [V]
    double V_bs = 0.0; // beta primary voltage [V]
    double F_L = 0.0;  // external load force [N]
};

// Throws Error(validation) if the parameter invariants do not hold.
DerivedParams derive_params(const MotorParams &p);

inline double electromagnetic_force(const MotorState &s,
                                    const DerivedParams &d) {
    return d.kf * (s.lam_ar * s.i_bs - s.lam_br * s.i_as);
}

// Right-hand side of the five state equations.
MotorState derivative(const MotorState &s, const PlantInput &in,
                      const MotorParams &p, const DerivedParams &d);

// One explicit forward-Euler step: s + dt * derivative(s, in).
MotorState euler_step(const MotorState &s, const PlantInput &in, double dt,
                      const MotorParams &p, const DerivedParams &d);

// Forward Euler with the input held constant, dt split into substeps.
// Used as a reference integrator and for optional sub-stepped prediction.
MotorState simulate_fine(const MotorState &s, const PlantInput &in, double dt,
                         int substeps, const MotorParams &p,
                         const DerivedParams &d);

inline bool all_finite(const MotorState &s) {
    return std::isfinite(s.i_as) && std::isfinite(s.i_bs) &&
           std::isfinite(s.lam_ar) && std::isfinite(s.lam_br) &&
           std::isfinite(s.v);
}

inline double current_magnitude(const MotorState &s) {
    return std::hypot(s.i_as, s.i_bs);
}

inline double flux_magnitude(const MotorState &s) {
    return std::hypot(s.lam_ar, s.lam_br);
}

} // namespace limsim
