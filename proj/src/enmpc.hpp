#pragma once

#include "flux_estimator.hpp"
#include "inverter.hpp"
#include "motor.hpp"

#include <cstdint>
#include <vector>

namespace limsim {

// One segment of the multi-rate prediction grid: `repeat` steps of
// duration `dt`, each integrated with `substeps` Euler sub-steps
// (substeps = 1 reproduces the plain discretization).
struct ScheduleEntry {
    double dt = 1e-4;
    int repeat = 1;
    int substeps = 1;
};

// Where the controller takes its secondary-flux feedback from. The
// voltage model integrates V - Rs*i (stator side); the current model
// propagates the rotor flux equation from measured currents and speed,
// which has no Rs dependence and stays bounded at low speed.
enum class FluxSource { voltage_model, current_model };

struct ControllerConfig {
    double Q = 1e6;                  // speed tracking weight
    double P_E = 500.0;              // integral-error weight
    std::vector<double> P_sw = {1.0}; // switch penalties, one per control move
    double K_gain = 15.0;            // integral gain of the error-sum update
    double E_sat = 1000.0;           // error-sum freeze limit
    int Nu = 1;                      // control horizon
    std::vector<ScheduleEntry> schedule = {{1e-4, 2, 1}, {4e-4, 2, 1}};
    double lam_max = 0.45;           // predicted secondary flux bound [Wb]
    double i_max = 50.0;             // predicted primary current bound [A]
    bool estimate_load = true;       // feed a measured-load estimate to the
                                     // predictor instead of assuming zero
    FluxSource flux_source = FluxSource::voltage_model;
    int parallel_chunks = 1;         // >1 evaluates candidates concurrently

    int prediction_steps() const {
        int n = 0;
        for (const auto &e : schedule)
            n += e.repeat;
        return n;
    }
    double prediction_interval() const {
        double T = 0.0;
        for (const auto &e : schedule)
            T += e.dt * e.repeat;
        return T;
    }
};

// Paper tuning for Ts = 100 us: 4 prediction steps covering 10*Ts.
ControllerConfig default_config(double Ts = 1e-4);

// Throws Error(validation) when an invariant is broken.
void validate_config(const ControllerConfig &cfg);

struct ControllerState {
    double E = 0.0;                 // accumulated tracking error
    SwitchState u_prev = {0, 0, 0}; // last applied control
    // One-step-behind load reconstruction from measured speed and the
    // force estimate; active when cfg.estimate_load is set.
    bool have_prev = false;
    double prev_v = 0.0;
    double prev_Fe = 0.0;
    double F_L_hat = 0.0;
    int64_t infeasible_ticks = 0; // ticks resolved by the fallback rule
};

struct ReferencePreview {
    double w_now = 0.0;    // reference at the current tick, for the error sum
    std::vector<double> w; // one reference per prediction step, w(k+1)..w(k+N)
};

struct CandidateSequence {
    std::vector<SwitchState> controls; // Nu switch states
    double cost = 0.0;                 // +inf when constraint-violating
};

struct PredictionStep {
    MotorState state;
    double E_hat = 0.0; // error-sum value entering this step's cost
    bool violates = false;
};

// E' = E + K*(w - v), frozen when |E'| would exceed E_sat.
double update_error(double E, double w_now, double v_now,
                    const ControllerConfig &cfg);

// Incremental cost of prediction step `step_index` (0-based). The switch
// term applies only while the control is free (step_index < Nu); held
// steps cause no transitions.
double stage_cost(double v_hat, double w_j, double E_hat, SwitchState u_j,
                  SwitchState u_prev_j, const ControllerConfig &cfg,
                  int step_index);

// Rolls the prediction model along the schedule for one candidate
// sequence. Control for step j is seq[min(j, Nu-1)].
std::vector<PredictionStep> predict(const MotorState &s0, double E0,
                                    const CandidateSequence &seq,
                                    const ReferencePreview &ref,
                                    double F_L_assumed,
                                    const ControllerConfig &cfg,
                                    const InverterParams &inv,
                                    const MotorParams &p,
                                    const DerivedParams &d);

struct SearchResult {
    CandidateSequence best;
    double cost = 0.0;
    bool all_infeasible = false;
    int64_t full_evaluations = 0; // candidates whose cost reached the horizon
    int64_t stage_evaluations = 0;
};

// Evaluates every sequence completely; the oracle for the pruned search.
SearchResult search_exhaustive(const MotorState &s0,
                               const ControllerState &ctrl,
                               const ReferencePreview &ref, double F_L_assumed,
                               const ControllerConfig &cfg,
                               const InverterParams &inv, const MotorParams &p,
                               const DerivedParams &d);

// Incremental enumeration: a candidate is abandoned as soon as its
// accumulated cost exceeds the incumbent. Returns the same (argmin, min)
// as search_exhaustive under first-found tie-breaking.
SearchResult search_pruned(const MotorState &s0, const ControllerState &ctrl,
                           const ReferencePreview &ref, double F_L_assumed,
                           const ControllerConfig &cfg,
                           const InverterParams &inv, const MotorParams &p,
                           const DerivedParams &d);

struct StepDiagnostics {
    double cost = 0.0;
    int64_t full_evaluations = 0;
    bool all_infeasible = false;
    double F_L_assumed = 0.0;
};

// One receding-horizon step: update the error sum and load estimate,
// search, apply the first control of the winner.
SwitchState control_step(const MotorState &measured,
                         const ReferencePreview &ref, ControllerState &state,
                         const ControllerConfig &cfg, const InverterParams &inv,
                         const MotorParams &p, const DerivedParams &d,
                         double Ts, StepDiagnostics *diag = nullptr);

} // namespace limsim
