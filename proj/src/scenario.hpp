#pragma once

#include "dtc.hpp"
#include "enmpc.hpp"
#include "inverter.hpp"
#include "motor.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace limsim {

struct ProfilePoint {
    double t = 0.0;
    double value = 0.0;
};

enum class ControllerKind { enmpc, dtc };

struct Scenario {
    std::string name;
    double duration = 1.0;
    double Ts = 1e-4;
    InverterParams inverter;
    MotorParams motor;            // plant side, possibly perturbed
    MotorParams controller_motor; // model side, nominal
    MotorState initial_state;
    std::vector<ProfilePoint> speed_profile; // piecewise linear (t, w)
    std::vector<ProfilePoint> load_profile;  // piecewise constant (t, F_L)
    ControllerKind controller_kind = ControllerKind::enmpc;
    ControllerConfig enmpc;
    DtcConfig dtc;

    int step_count() const; // duration / Ts, validated to be integral
};

// Piecewise-linear interpolation, clamped to the end values.
double sample_speed(const Scenario &sc, double t);
// Piecewise-constant (value of the latest step at or before t).
double sample_load(const Scenario &sc, double t);

void validate_scenario(const Scenario &sc);

// Strict parse: unknown keys are rejected, missing optional keys take
// defaults (vdc 255 V, nominal Table-2 motor, paper controller tuning).
Scenario scenario_from_json(const nlohmann::json &j);
nlohmann::json scenario_to_json(const Scenario &sc);

Scenario scenario_from_string(const std::string &text);
Scenario scenario_from_file(const std::string &path);

const std::vector<std::string> &builtin_scenario_names();
Scenario builtin_scenario(const std::string &name);
std::vector<Scenario> shipped_scenarios();

} // namespace limsim
