#include "harness.hpp"

#include "error.hpp"
#include "flux_estimator.hpp"

#include <chrono>
#include <numbers>
#include <cmath>

namespace limsim {

namespace {

using clock_type = std::chrono::steady_clock;

void fill_row_common(TraceRow &row, double t, double w, const MotorState &x,
                     const FluxEstimate &hat, double Fe, double F_L) {
    const double s32 = std::sqrt(3.0) / 2.0;
    row.t = t;
    row.w = w;
    row.v = x.v;
    row.i_as = x.i_as;
    row.i_bs = x.i_bs;
    row.i_1 = x.i_as;
    row.i_2 = -0.5 * x.i_as - s32 * x.i_bs;
    row.i_3 = -0.5 * x.i_as + s32 * x.i_bs;
    row.lam_ar = x.lam_ar;
    row.lam_br = x.lam_br;
    row.lam_ar_hat = hat.lam_ar_hat;
    row.lam_br_hat = hat.lam_br_hat;
    row.Fe = Fe;
    row.F_L = F_L;
}

} // namespace

RunResult run(const Scenario &sc) {
    validate_scenario(sc);

    const MotorParams &plant_p = sc.motor;
    const DerivedParams plant_d = derive_params(plant_p);
    const MotorParams &model_p = sc.controller_motor;
    const DerivedParams model_d = derive_params(model_p);

    const int n = sc.step_count();
    const double Ts = sc.Ts;

    MotorState x = sc.initial_state;
    EstimatorState est = consistent_init(x, model_p, model_d);
    // Current-model flux feedback: the rotor flux equation driven by the
    // measured currents and speed. Same Euler grid as the plant.
    double cm_ar = x.lam_ar, cm_br = x.lam_br;

    ControllerState enmpc_state;
    DtcState dtc_state;

    // Prediction-step offsets for the reference preview.
    std::vector<double> preview_offsets;
    if (sc.controller_kind == ControllerKind::enmpc) {
        double acc = 0.0;
        for (const auto &e : sc.enmpc.schedule)
            for (int i = 0; i < e.repeat; ++i) {
                acc += e.dt;
                preview_offsets.push_back(acc);
            }
    }

    RunResult out;
    out.trace.rows.reserve(static_cast<size_t>(n) + 1);

    const bool use_current_model =
        sc.controller_kind == ControllerKind::enmpc &&
        sc.enmpc.flux_source == FluxSource::current_model;

    for (int k = 0; k < n; ++k) {
        const double t = k * Ts;
        const double w = sample_speed(sc, t);
        const double F_L = sample_load(sc, t);
        const FluxEstimate hat =
            use_current_model
                ? FluxEstimate{cm_ar, cm_br}
                : secondary_flux(est, x.i_as, x.i_bs, model_p, model_d);

        TraceRow row;
        fill_row_common(row, t, w, x, hat, electromagnetic_force(x, plant_d),
                        F_L);

        SwitchState u;
        const auto t0 = clock_type::now();
        if (sc.controller_kind == ControllerKind::enmpc) {
            MotorState measured = x;
            measured.lam_ar = hat.lam_ar_hat;
            measured.lam_br = hat.lam_br_hat;
            ReferencePreview ref;
            ref.w_now = w;
            ref.w.reserve(preview_offsets.size());
            for (double off : preview_offsets)
                ref.w.push_back(sample_speed(sc, t + off));
            StepDiagnostics diag;
            u = control_step(measured, ref, enmpc_state, sc.enmpc, sc.inverter,
                             model_p, model_d, Ts, &diag);
            row.E = enmpc_state.E;
            row.cost = diag.cost;
            row.evals = diag.full_evaluations;
        } else {
            const double Fe_est =
                model_d.kf * (hat.lam_ar_hat * x.i_bs - hat.lam_br_hat * x.i_as);
            u = dtc_step(x.v, est.lam_as, est.lam_bs, Fe_est, w, dtc_state,
                         sc.dtc, Ts);
            row.E = dtc_state.pi_integral;
        }
        row.step_time_us =
            std::chrono::duration<double, std::micro>(clock_type::now() - t0)
                .count();
        row.u = u;
        out.trace.rows.push_back(row);

        const VoltageAlphaBeta V = voltage(u, sc.inverter);
        const MotorState next =
            euler_step(x, {V.V_as, V.V_bs, F_L}, Ts, plant_p, plant_d);
        if (!all_finite(next))
            throw Error(ErrorCode::numeric,
                        "plant state became non-finite at t = " +
                            format_double(t + Ts) + " s (scenario '" + sc.name +
                            "')");
        est = update(est, V, x.i_as, x.i_bs, model_p.Rs, Ts);
        if (use_current_model) {
            const double we = model_p.np * std::numbers::pi / model_p.h * x.v;
            const double na =
                cm_ar + Ts * (model_p.Lm / model_d.Tr * x.i_as -
                              cm_ar / model_d.Tr - we * cm_br);
            const double nb =
                cm_br + Ts * (model_p.Lm / model_d.Tr * x.i_bs +
                              we * cm_ar - cm_br / model_d.Tr);
            cm_ar = na;
            cm_br = nb;
        }
        x = next;
    }

    // Terminal record: final state, last applied control, no diagnostics.
    {
        const double t = sc.duration;
        const double w = sample_speed(sc, t);
        const FluxEstimate hat =
            use_current_model
                ? FluxEstimate{cm_ar, cm_br}
                : secondary_flux(est, x.i_as, x.i_bs, model_p, model_d);
        TraceRow row;
        fill_row_common(row, t, w, x, hat, electromagnetic_force(x, plant_d),
                        sample_load(sc, t));
        row.u = out.trace.rows.empty() ? SwitchState{}
                                       : out.trace.rows.back().u;
        row.E = out.trace.rows.empty() ? 0.0 : out.trace.rows.back().E;
        out.trace.rows.push_back(row);
    }

    out.metrics = compute_metrics(out.trace, sc);
    return out;
}

} // namespace limsim
