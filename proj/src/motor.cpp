#include "motor.hpp"

#include "error.hpp"

#include <numbers>
#include <string>

namespace limsim {

DerivedParams derive_params(const MotorParams &p) {
    auto positive = [](double x, const char *name) {
        if (!(x > 0.0))
            throw Error(ErrorCode::validation,
                        std::string("motor parameter ") + name +
                            " must be positive");
    };
    positive(p.Rs, "Rs");
    positive(p.Rr, "Rr");
    positive(p.Ls, "Ls");
    positive(p.Lr, "Lr");
    positive(p.Lm, "Lm");
    positive(p.h, "h");
    positive(p.M, "M");
    positive(p.D, "D");
    positive(p.Vrated, "Vrated");
    positive(p.Irated, "Irated");
    positive(p.flux_rated, "flux_rated");
    if (p.np < 1)
        throw Error(ErrorCode::validation, "pole pairs np must be >= 1");
    if (!(p.Lm * p.Lm < p.Ls * p.Lr))
        throw Error(ErrorCode::validation,
                    "Lm^2 must be below Ls*Lr (leakage coefficient in (0,1))");

    DerivedParams d;
    d.sigma = 1.0 - (p.Lm * p.Lm) / (p.Ls * p.Lr);
    d.Tr = p.Lr / p.Rr;
    d.kf = 3.0 * p.np * p.Lm * std::numbers::pi / (2.0 * p.Lr * p.h);
    return d;
}

MotorState derivative(const MotorState &s, const PlantInput &in,
                      const MotorParams &p, const DerivedParams &d) {
    const double sLs = d.sigma * p.Ls;
    const double a = p.Rs / sLs + (1.0 - d.sigma) / (d.sigma * d.Tr);
    const double b = p.Lm / (sLs * p.Lr * d.Tr);
    const double c = p.np * p.Lm * std::numbers::pi / (sLs * p.Lr * p.h);
    const double w = p.np * std::numbers::pi / p.h; // electrical rad/s per m/s

    MotorState r;
    r.i_as = -a * s.i_as + b * s.lam_ar + c * s.v * s.lam_br + in.V_as / sLs;
    r.i_bs = -a * s.i_bs - c * s.v * s.lam_ar + b * s.lam_br + in.V_bs / sLs;
    r.lam_ar = p.Lm / d.Tr * s.i_as - s.lam_ar / d.Tr - w * s.v * s.lam_br;
    r.lam_br = p.Lm / d.Tr * s.i_bs + w * s.v * s.lam_ar - s.lam_br / d.Tr;
    r.v = (electromagnetic_force(s, d) - p.D * s.v - in.F_L) / p.M;
    return r;
}

MotorState euler_step(const MotorState &s, const PlantInput &in, double dt,
                      const MotorParams &p, const DerivedParams &d) {
    const MotorState r = derivative(s, in, p, d);
    MotorState n;
    n.i_as = s.i_as + dt * r.i_as;
    n.i_bs = s.i_bs + dt * r.i_bs;
    n.lam_ar = s.lam_ar + dt * r.lam_ar;
    n.lam_br = s.lam_br + dt * r.lam_br;
    n.v = s.v + dt * r.v;
    return n;
}

MotorState simulate_fine(const MotorState &s, const PlantInput &in, double dt,
                         int substeps, const MotorParams &p,
                         const DerivedParams &d) {
    if (substeps < 1)
        throw Error(ErrorCode::invalid_argument, "substeps must be >= 1");
    const double h = dt / substeps;
    MotorState x = s;
    for (int i = 0; i < substeps; ++i)
        x = euler_step(x, in, h, p, d);
    return x;
}

} // namespace limsim
