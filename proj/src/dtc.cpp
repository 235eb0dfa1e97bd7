#include "dtc.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace limsim {

namespace {

// Active vectors ordered by voltage angle 0, 60, ..., 300 degrees under
// the sign convention of the inverter map.
constexpr int kActiveByAngle[6] = {0, 5, 2, 4, 1, 3};

} // namespace

DtcConfig default_dtc_config(const MotorParams &p, const DerivedParams &d) {
    DtcConfig cfg;
    // Double closed-loop pole at s = -p0 on M dv/dt = F - D v:
    //   Kp = 2 M p0 - D, Ki = M p0^2, p0 chosen for ~0.1 s settling.
    const double p0 = 58.0;
    cfg.Kp = 2.0 * p.M * p0 - p.D;
    cfg.Ki = p.M * p0 * p0;
    cfg.flux_ref = 0.15;
    cfg.flux_band = 0.02 * cfg.flux_ref;
    cfg.force_band = 0.05 * d.kf * p.Irated * p.flux_rated; // 5% of nominal force
    cfg.force_limit = 1000.0;
    return cfg;
}

void validate_dtc_config(const DtcConfig &cfg) {
    if (!(cfg.flux_ref > 0.0))
        throw Error(ErrorCode::validation, "dtc flux_ref must be positive");
    if (!(cfg.flux_band > 0.0) || !(cfg.force_band > 0.0))
        throw Error(ErrorCode::validation, "dtc hysteresis bands must be positive");
    if (!(cfg.force_limit > 0.0))
        throw Error(ErrorCode::validation, "dtc force_limit must be positive");
}

int sector(double lam_as, double lam_bs) {
    if (lam_as == 0.0 && lam_bs == 0.0)
        return 1;
    const double theta = std::atan2(lam_bs, lam_as);
    const double third = std::numbers::pi / 3.0;
    // ceil((theta - 30deg)/60deg): boundary angles land in the lower sector
    int k = static_cast<int>(std::ceil((theta - 0.5 * third) / third));
    k = ((k % 6) + 6) % 6;
    return k + 1;
}

SwitchState dtc_table(int flux_cmp, int force_cmp, int sec) {
    const int k = sec - 1;
    if (force_cmp == 0) {
        // Zero vector by sector parity, the classic allocation.
        return (sec % 2 == 1) ? kSwitchStates[6] : kSwitchStates[7];
    }
    int offset;
    if (flux_cmp == 1)
        offset = (force_cmp > 0) ? 1 : -1;
    else
        offset = (force_cmp > 0) ? 2 : -2;
    return kSwitchStates[kActiveByAngle[((k + offset) % 6 + 6) % 6]];
}

SwitchState dtc_step(double v, double lam_as, double lam_bs, double Fe_est,
                     double w_now, DtcState &state, const DtcConfig &cfg,
                     double Ts) {
    // Outer PI speed loop with clamped integral (anti-windup).
    const double e = w_now - v;
    state.pi_integral = std::clamp(state.pi_integral + cfg.Ki * e * Ts,
                                   -cfg.force_limit, cfg.force_limit);
    const double F_ref = std::clamp(cfg.Kp * e + state.pi_integral,
                                    -cfg.force_limit, cfg.force_limit);

    // Flux comparator: two-level hysteresis around flux_ref.
    const double ef = cfg.flux_ref - std::hypot(lam_as, lam_bs);
    if (ef > cfg.flux_band)
        state.flux_comparator = 1;
    else if (ef < -cfg.flux_band)
        state.flux_comparator = 0;

    // Force comparator: three-level, returning to 0 on zero crossing.
    const double eF = F_ref - Fe_est;
    if (eF > cfg.force_band)
        state.force_comparator = +1;
    else if (eF < -cfg.force_band)
        state.force_comparator = -1;
    else if (state.force_comparator == +1 && eF <= 0.0)
        state.force_comparator = 0;
    else if (state.force_comparator == -1 && eF >= 0.0)
        state.force_comparator = 0;

    return dtc_table(state.flux_comparator, state.force_comparator,
                     sector(lam_as, lam_bs));
}

} // namespace limsim
