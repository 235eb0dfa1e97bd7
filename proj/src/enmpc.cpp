#include "enmpc.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>

namespace limsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int64_t pow8(int n) {
    int64_t r = 1;
    while (n-- > 0)
        r *= 8;
    return r;
}

// Flattened schedule: one entry per prediction step.
struct Grid {
    std::vector<double> dt;
    std::vector<int> substeps;
};

Grid flatten(const ControllerConfig &cfg) {
    Grid g;
    for (const auto &e : cfg.schedule)
        for (int i = 0; i < e.repeat; ++i) {
            g.dt.push_back(e.dt);
            g.substeps.push_back(e.substeps);
        }
    return g;
}

struct EvalOutcome {
    double cost = 0.0;        // +inf when infeasible
    bool completed = false;   // cost accumulated through the full horizon
    bool infeasible = false;  // some step violated a constraint
    double violation = 0.0;   // max relative constraint magnitude seen
    int stages = 0;
};

// Accumulates the cost of one candidate step by step. Abandons as soon as
// the running sum exceeds `prune_above` (strictly), or a constraint is
// violated. For violating candidates the trajectory is still rolled to
// the end so the relative violation is known for the fallback rule.
EvalOutcome evaluate_candidate(const MotorState &s0, double E0,
                               const int *digits, int Nu,
                               const ReferencePreview &ref, double F_L_assumed,
                               const ControllerConfig &cfg, const Grid &grid,
                               SwitchState u_prev,
                               const VoltageAlphaBeta *volts,
                               const MotorParams &p, const DerivedParams &d,
                               double prune_above) {
    const int N = static_cast<int>(grid.dt.size());
    EvalOutcome out;
    MotorState x = s0;
    double E_hat = E0;
    double J = 0.0;

    for (int j = 0; j < N; ++j) {
        const int move = std::min(j, Nu - 1);
        const SwitchState u = kSwitchStates[digits[move]];
        const VoltageAlphaBeta V = volts[digits[move]];
        const PlantInput in{V.V_as, V.V_bs, F_L_assumed};

        const int ns = grid.substeps[j];
        const double h = grid.dt[j] / ns;
        for (int k = 0; k < ns; ++k)
            x = euler_step(x, in, h, p, d);
        ++out.stages;

        if (!all_finite(x)) {
            out.infeasible = true;
            out.violation = kInf;
            out.cost = kInf;
            return out;
        }
        const double flux = flux_magnitude(x);
        const double cur = current_magnitude(x);
        out.violation =
            std::max({out.violation, flux / cfg.lam_max, cur / cfg.i_max});
        if (flux > cfg.lam_max || cur > cfg.i_max) {
            out.infeasible = true;
            out.cost = kInf;
            // keep rolling to measure the worst violation for the fallback
            for (int jj = j + 1; jj < N; ++jj) {
                const int mv = std::min(jj, Nu - 1);
                const VoltageAlphaBeta Vj = volts[digits[mv]];
                const PlantInput inj{Vj.V_as, Vj.V_bs, F_L_assumed};
                const int nsj = grid.substeps[jj];
                const double hj = grid.dt[jj] / nsj;
                for (int k = 0; k < nsj; ++k)
                    x = euler_step(x, inj, hj, p, d);
                if (!all_finite(x)) {
                    out.violation = kInf;
                    return out;
                }
                out.violation = std::max({out.violation,
                                          flux_magnitude(x) / cfg.lam_max,
                                          current_magnitude(x) / cfg.i_max});
            }
            return out;
        }

        const SwitchState u_before =
            (j == 0) ? u_prev : kSwitchStates[digits[std::min(j - 1, Nu - 1)]];
        J += stage_cost(x.v, ref.w[j], E_hat, u, u_before, cfg, j);
        if (J > prune_above) {
            out.cost = J;
            return out; // abandoned; cannot beat the incumbent
        }
        const double En = E_hat + cfg.K_gain * (ref.w[j] - x.v);
        if (std::abs(En) <= cfg.E_sat)
            E_hat = En;
    }
    out.cost = J;
    out.completed = true;
    return out;
}

struct RangeResult {
    int64_t best_index = -1;
    double best_cost = kInf;
    int64_t best_violation_index = -1;
    double best_violation = kInf;
    int64_t full_evaluations = 0;
    int64_t stage_evaluations = 0;
};

RangeResult search_range(int64_t lo, int64_t hi, bool prune,
                         const MotorState &s0, const ControllerState &ctrl,
                         const ReferencePreview &ref, double F_L_assumed,
                         const ControllerConfig &cfg, const Grid &grid,
                         const VoltageAlphaBeta *volts, const MotorParams &p,
                         const DerivedParams &d) {
    RangeResult r;
    const int Nu = cfg.Nu;
    int digits[16];
    for (int64_t i = lo; i < hi; ++i) {
        int64_t rem = i;
        for (int m = Nu - 1; m >= 0; --m) {
            digits[m] = static_cast<int>(rem % 8);
            rem /= 8;
        }
        const double bound = prune ? r.best_cost : kInf;
        EvalOutcome e =
            evaluate_candidate(s0, ctrl.E, digits, Nu, ref, F_L_assumed, cfg,
                               grid, ctrl.u_prev, volts, p, d, bound);
        r.stage_evaluations += e.stages;
        if (e.infeasible) {
            if (e.violation < r.best_violation) {
                r.best_violation = e.violation;
                r.best_violation_index = i;
            }
            continue;
        }
        if (e.completed) {
            ++r.full_evaluations;
            if (e.cost < r.best_cost) {
                r.best_cost = e.cost;
                r.best_index = i;
            }
        }
    }
    return r;
}

CandidateSequence sequence_from_index(int64_t index, int Nu, double cost) {
    CandidateSequence seq;
    seq.controls.resize(Nu);
    int64_t rem = index;
    for (int m = Nu - 1; m >= 0; --m) {
        seq.controls[m] = kSwitchStates[rem % 8];
        rem /= 8;
    }
    seq.cost = cost;
    return seq;
}

SearchResult run_search(bool prune, const MotorState &s0,
                        const ControllerState &ctrl,
                        const ReferencePreview &ref, double F_L_assumed,
                        const ControllerConfig &cfg, const InverterParams &inv,
                        const MotorParams &p, const DerivedParams &d) {
    validate_config(cfg);
    const int N = cfg.prediction_steps();
    if (static_cast<int>(ref.w.size()) != N)
        throw Error(ErrorCode::invalid_argument,
                    "reference preview length does not match the schedule");

    const Grid grid = flatten(cfg);
    VoltageAlphaBeta volts[8];
    for (int i = 0; i < 8; ++i)
        volts[i] = voltage(kSwitchStates[i], inv);

    const int64_t total = pow8(cfg.Nu);
    const int chunks =
        std::clamp<int>(cfg.parallel_chunks, 1, static_cast<int>(total));

    std::vector<RangeResult> parts;
    if (chunks == 1) {
        parts.push_back(search_range(0, total, prune, s0, ctrl, ref,
                                     F_L_assumed, cfg, grid, volts, p, d));
    } else {
        std::vector<std::future<RangeResult>> futs;
        for (int c = 0; c < chunks; ++c) {
            const int64_t lo = total * c / chunks;
            const int64_t hi = total * (c + 1) / chunks;
            futs.push_back(std::async(std::launch::async, [&, lo, hi] {
                return search_range(lo, hi, prune, s0, ctrl, ref, F_L_assumed,
                                    cfg, grid, volts, p, d);
            }));
        }
        for (auto &f : futs)
            parts.push_back(f.get());
    }

    // Deterministic merge: min cost, ties to the lowest enumeration index.
    RangeResult merged;
    for (const auto &part : parts) {
        merged.full_evaluations += part.full_evaluations;
        merged.stage_evaluations += part.stage_evaluations;
        if (part.best_index >= 0 &&
            (part.best_cost < merged.best_cost ||
             (part.best_cost == merged.best_cost &&
              part.best_index < merged.best_index)))
            merged.best_cost = part.best_cost, merged.best_index = part.best_index;
        if (part.best_violation_index >= 0 &&
            (part.best_violation < merged.best_violation ||
             (part.best_violation == merged.best_violation &&
              part.best_violation_index < merged.best_violation_index)))
            merged.best_violation = part.best_violation,
            merged.best_violation_index = part.best_violation_index;
    }

    SearchResult res;
    res.full_evaluations = merged.full_evaluations;
    res.stage_evaluations = merged.stage_evaluations;
    if (merged.best_index < 0) {
        // Every sequence violated a constraint: fall back to the one with
        // the smallest worst-case relative violation.
        res.all_infeasible = true;
        res.cost = kInf;
        res.best = sequence_from_index(merged.best_violation_index, cfg.Nu, kInf);
        return res;
    }
    res.cost = merged.best_cost;
    res.best = sequence_from_index(merged.best_index, cfg.Nu, merged.best_cost);
    return res;
}

} // namespace

ControllerConfig default_config(double Ts) {
    ControllerConfig cfg;
    cfg.schedule = {{Ts, 2, 1}, {4.0 * Ts, 2, 1}};
    return cfg;
}

void validate_config(const ControllerConfig &cfg) {
    if (cfg.Nu < 1 || cfg.Nu > 8)
        throw Error(ErrorCode::validation, "Nu must be in [1, 8]");
    if (cfg.Q < 0.0 || cfg.P_E < 0.0 || cfg.K_gain < 0.0)
        throw Error(ErrorCode::validation, "Q, P_E and K_gain must be >= 0");
    if (static_cast<int>(cfg.P_sw.size()) != cfg.Nu)
        throw Error(ErrorCode::validation, "P_sw must have one entry per control move");
    for (double p : cfg.P_sw)
        if (!(p > 0.0))
            throw Error(ErrorCode::validation, "all P_sw entries must be positive");
    for (int i = 1; i < cfg.Nu; ++i)
        if (!(cfg.P_sw[i - 1] > cfg.P_sw[i]))
            throw Error(ErrorCode::validation,
                        "P_sw must be strictly decreasing for Nu > 1");
    if (cfg.schedule.empty())
        throw Error(ErrorCode::validation, "schedule must not be empty");
    for (const auto &e : cfg.schedule) {
        if (!(e.dt > 0.0))
            throw Error(ErrorCode::validation, "schedule durations must be positive");
        if (e.repeat < 1)
            throw Error(ErrorCode::validation, "schedule repeat counts must be >= 1");
        if (e.substeps < 1)
            throw Error(ErrorCode::validation, "schedule substeps must be >= 1");
    }
    if (cfg.prediction_steps() < cfg.Nu)
        throw Error(ErrorCode::validation,
                    "prediction steps must cover the control horizon");
    if (!(cfg.E_sat > 0.0))
        throw Error(ErrorCode::validation, "E_sat must be positive");
    if (!(cfg.lam_max > 0.0) || !(cfg.i_max > 0.0))
        throw Error(ErrorCode::validation, "lam_max and i_max must be positive");
    if (cfg.parallel_chunks < 1)
        throw Error(ErrorCode::validation, "parallel_chunks must be >= 1");
}

double update_error(double E, double w_now, double v_now,
                    const ControllerConfig &cfg) {
    const double En = E + cfg.K_gain * (w_now - v_now);
    return std::abs(En) > cfg.E_sat ? E : En;
}

double stage_cost(double v_hat, double w_j, double E_hat, SwitchState u_j,
                  SwitchState u_prev_j, const ControllerConfig &cfg,
                  int step_index) {
    const double ev = v_hat - w_j;
    double J = cfg.Q * ev * ev + cfg.P_E * E_hat * E_hat;
    if (step_index < cfg.Nu)
        J += cfg.P_sw[step_index] * switch_count(u_prev_j, u_j);
    return J;
}

std::vector<PredictionStep> predict(const MotorState &s0, double E0,
                                    const CandidateSequence &seq,
                                    const ReferencePreview &ref,
                                    double F_L_assumed,
                                    const ControllerConfig &cfg,
                                    const InverterParams &inv,
                                    const MotorParams &p,
                                    const DerivedParams &d) {
    validate_config(cfg);
    if (static_cast<int>(seq.controls.size()) != cfg.Nu)
        throw Error(ErrorCode::invalid_argument, "sequence length must equal Nu");
    const Grid grid = flatten(cfg);
    const int N = static_cast<int>(grid.dt.size());
    if (static_cast<int>(ref.w.size()) != N)
        throw Error(ErrorCode::invalid_argument,
                    "reference preview length does not match the schedule");

    std::vector<PredictionStep> steps;
    steps.reserve(N);
    MotorState x = s0;
    double E_hat = E0;
    for (int j = 0; j < N; ++j) {
        const SwitchState u = seq.controls[std::min(j, cfg.Nu - 1)];
        const VoltageAlphaBeta V = voltage(u, inv);
        const PlantInput in{V.V_as, V.V_bs, F_L_assumed};
        const int ns = grid.substeps[j];
        const double h = grid.dt[j] / ns;
        for (int k = 0; k < ns; ++k)
            x = euler_step(x, in, h, p, d);

        PredictionStep st;
        st.state = x;
        st.E_hat = E_hat;
        st.violates = !all_finite(x) || flux_magnitude(x) > cfg.lam_max ||
                      current_magnitude(x) > cfg.i_max;
        steps.push_back(st);

        const double En = E_hat + cfg.K_gain * (ref.w[j] - x.v);
        if (std::abs(En) <= cfg.E_sat)
            E_hat = En;
    }
    return steps;
}

SearchResult search_exhaustive(const MotorState &s0,
                               const ControllerState &ctrl,
                               const ReferencePreview &ref, double F_L_assumed,
                               const ControllerConfig &cfg,
                               const InverterParams &inv, const MotorParams &p,
                               const DerivedParams &d) {
    return run_search(false, s0, ctrl, ref, F_L_assumed, cfg, inv, p, d);
}

SearchResult search_pruned(const MotorState &s0, const ControllerState &ctrl,
                           const ReferencePreview &ref, double F_L_assumed,
                           const ControllerConfig &cfg,
                           const InverterParams &inv, const MotorParams &p,
                           const DerivedParams &d) {
    return run_search(true, s0, ctrl, ref, F_L_assumed, cfg, inv, p, d);
}

SwitchState control_step(const MotorState &measured,
                         const ReferencePreview &ref, ControllerState &state,
                         const ControllerConfig &cfg, const InverterParams &inv,
                         const MotorParams &p, const DerivedParams &d,
                         double Ts, StepDiagnostics *diag) {
    // Reconstruct the load force from the previous tick's force estimate
    // and the measured speed change. One step behind; exact when the flux
    // estimate is exact.
    if (cfg.estimate_load && state.have_prev)
        state.F_L_hat =
            state.prev_Fe - p.D * state.prev_v -
            p.M * (measured.v - state.prev_v) / Ts;
    state.prev_Fe = electromagnetic_force(measured, d);
    state.prev_v = measured.v;
    state.have_prev = true;
    const double F_L_assumed = cfg.estimate_load ? state.F_L_hat : 0.0;

    state.E = update_error(state.E, ref.w_now, measured.v, cfg);

    SearchResult res =
        search_pruned(measured, state, ref, F_L_assumed, cfg, inv, p, d);
    if (res.all_infeasible && ++state.infeasible_ticks == 1)
        std::fprintf(stderr,
                     "limsim: warning: all candidate sequences violate "
                     "constraints; applying least-violating control "
                     "(reported once)\n");

    state.u_prev = res.best.controls.front();
    if (diag) {
        diag->cost = res.cost;
        diag->full_evaluations = res.full_evaluations;
        diag->all_infeasible = res.all_infeasible;
        diag->F_L_assumed = F_L_assumed;
    }
    return state.u_prev;
}

} // namespace limsim
