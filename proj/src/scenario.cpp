#include "scenario.hpp"

#include "error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace limsim {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json &j, std::initializer_list<const char *> allowed,
                         const std::string &context) {
    for (const auto &item : j.items()) {
        bool known = false;
        for (const char *k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw Error(ErrorCode::validation,
                        "unknown key '" + item.key() + "' in " + context);
    }
}

double get_number(const json &j, const char *key, double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        throw Error(ErrorCode::validation,
                    std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

MotorParams motor_from_json(const json &j, const std::string &context) {
    reject_unknown_keys(j,
                        {"Rs", "Rr", "Ls", "Lr", "Lm", "np", "h", "M", "D",
                         "Vrated", "Irated", "flux_rated"},
                        context);
    MotorParams p; // defaults are the nominal Table-2 machine
    p.Rs = get_number(j, "Rs", p.Rs);
    p.Rr = get_number(j, "Rr", p.Rr);
    p.Ls = get_number(j, "Ls", p.Ls);
    p.Lr = get_number(j, "Lr", p.Lr);
    p.Lm = get_number(j, "Lm", p.Lm);
    p.np = static_cast<int>(get_number(j, "np", p.np));
    p.h = get_number(j, "h", p.h);
    p.M = get_number(j, "M", p.M);
    p.D = get_number(j, "D", p.D);
    p.Vrated = get_number(j, "Vrated", p.Vrated);
    p.Irated = get_number(j, "Irated", p.Irated);
    p.flux_rated = get_number(j, "flux_rated", p.flux_rated);
    return p;
}

json motor_to_json(const MotorParams &p) {
    return json{{"Rs", p.Rs},         {"Rr", p.Rr},
                {"Ls", p.Ls},         {"Lr", p.Lr},
                {"Lm", p.Lm},         {"np", p.np},
                {"h", p.h},           {"M", p.M},
                {"D", p.D},           {"Vrated", p.Vrated},
                {"Irated", p.Irated}, {"flux_rated", p.flux_rated}};
}

std::vector<ProfilePoint> profile_from_json(const json &j, const char *value_key,
                                            const std::string &context) {
    if (!j.is_array() || j.empty())
        throw Error(ErrorCode::validation, context + " must be a non-empty array");
    std::vector<ProfilePoint> prof;
    for (const auto &e : j) {
        reject_unknown_keys(e, {"t", value_key}, context);
        if (!e.contains("t") || !e.contains(value_key))
            throw Error(ErrorCode::validation,
                        context + " entries need fields 't' and '" +
                            value_key + "'");
        prof.push_back({e.at("t").get<double>(), e.at(value_key).get<double>()});
    }
    return prof;
}

json profile_to_json(const std::vector<ProfilePoint> &prof,
                     const char *value_key) {
    json arr = json::array();
    for (const auto &p : prof)
        arr.push_back(json{{"t", p.t}, {value_key, p.value}});
    return arr;
}

ControllerConfig enmpc_from_json(const json &j, double Ts) {
    reject_unknown_keys(j,
                        {"type", "Q", "P_E", "P_sw", "K_gain", "E_sat", "Nu",
                         "schedule", "lam_max", "i_max", "estimate_load",
                         "flux_source", "parallel_chunks"},
                        "controller (enmpc)");
    ControllerConfig cfg = default_config(Ts);
    cfg.Q = get_number(j, "Q", cfg.Q);
    cfg.P_E = get_number(j, "P_E", cfg.P_E);
    cfg.K_gain = get_number(j, "K_gain", cfg.K_gain);
    cfg.E_sat = get_number(j, "E_sat", cfg.E_sat);
    cfg.Nu = static_cast<int>(get_number(j, "Nu", cfg.Nu));
    cfg.lam_max = get_number(j, "lam_max", cfg.lam_max);
    cfg.i_max = get_number(j, "i_max", cfg.i_max);
    cfg.parallel_chunks =
        static_cast<int>(get_number(j, "parallel_chunks", cfg.parallel_chunks));
    if (j.contains("estimate_load"))
        cfg.estimate_load = j.at("estimate_load").get<bool>();
    if (j.contains("flux_source")) {
        const std::string src = j.at("flux_source").get<std::string>();
        if (src == "voltage_model")
            cfg.flux_source = FluxSource::voltage_model;
        else if (src == "current_model")
            cfg.flux_source = FluxSource::current_model;
        else
            throw Error(ErrorCode::validation,
                        "flux_source must be 'voltage_model' or 'current_model'");
    }
    if (j.contains("P_sw"))
        cfg.P_sw = j.at("P_sw").get<std::vector<double>>();
    if (j.contains("schedule")) {
        cfg.schedule.clear();
        for (const auto &e : j.at("schedule")) {
            reject_unknown_keys(e, {"dt", "repeat", "substeps"}, "schedule");
            ScheduleEntry se;
            se.dt = e.at("dt").get<double>();
            se.repeat = e.at("repeat").get<int>();
            se.substeps = static_cast<int>(get_number(e, "substeps", 1));
            cfg.schedule.push_back(se);
        }
    }
    return cfg;
}

json enmpc_to_json(const ControllerConfig &cfg) {
    json sched = json::array();
    for (const auto &e : cfg.schedule)
        sched.push_back(
            json{{"dt", e.dt}, {"repeat", e.repeat}, {"substeps", e.substeps}});
    return json{{"type", "enmpc"},
                {"Q", cfg.Q},
                {"P_E", cfg.P_E},
                {"P_sw", cfg.P_sw},
                {"K_gain", cfg.K_gain},
                {"E_sat", cfg.E_sat},
                {"Nu", cfg.Nu},
                {"schedule", sched},
                {"lam_max", cfg.lam_max},
                {"i_max", cfg.i_max},
                {"estimate_load", cfg.estimate_load},
                {"flux_source", cfg.flux_source == FluxSource::voltage_model
                                    ? "voltage_model"
                                    : "current_model"},
                {"parallel_chunks", cfg.parallel_chunks}};
}

DtcConfig dtc_from_json(const json &j, const MotorParams &motor) {
    reject_unknown_keys(j,
                        {"type", "Kp", "Ki", "flux_ref", "flux_band",
                         "force_band", "force_limit"},
                        "controller (dtc)");
    DtcConfig cfg = default_dtc_config(motor, derive_params(motor));
    cfg.Kp = get_number(j, "Kp", cfg.Kp);
    cfg.Ki = get_number(j, "Ki", cfg.Ki);
    cfg.flux_ref = get_number(j, "flux_ref", cfg.flux_ref);
    cfg.flux_band = get_number(j, "flux_band", cfg.flux_band);
    cfg.force_band = get_number(j, "force_band", cfg.force_band);
    cfg.force_limit = get_number(j, "force_limit", cfg.force_limit);
    return cfg;
}

json dtc_to_json(const DtcConfig &cfg) {
    return json{{"type", "dtc"},
                {"Kp", cfg.Kp},
                {"Ki", cfg.Ki},
                {"flux_ref", cfg.flux_ref},
                {"flux_band", cfg.flux_band},
                {"force_band", cfg.force_band},
                {"force_limit", cfg.force_limit}};
}

MotorState state_from_json(const json &j) {
    reject_unknown_keys(j, {"i_as", "i_bs", "lam_ar", "lam_br", "v"},
                        "initial_state");
    MotorState s;
    s.i_as = get_number(j, "i_as", 0.0);
    s.i_bs = get_number(j, "i_bs", 0.0);
    s.lam_ar = get_number(j, "lam_ar", 0.0);
    s.lam_br = get_number(j, "lam_br", 0.0);
    s.v = get_number(j, "v", 0.0);
    return s;
}

json state_to_json(const MotorState &s) {
    return json{{"i_as", s.i_as},
                {"i_bs", s.i_bs},
                {"lam_ar", s.lam_ar},
                {"lam_br", s.lam_br},
                {"v", s.v}};
}

} // namespace

int Scenario::step_count() const {
    return static_cast<int>(std::llround(duration / Ts));
}

double sample_speed(const Scenario &sc, double t) {
    const auto &prof = sc.speed_profile;
    if (t <= prof.front().t)
        return prof.front().value;
    if (t >= prof.back().t)
        return prof.back().value;
    for (size_t i = 1; i < prof.size(); ++i) {
        if (t <= prof[i].t) {
            const double span = prof[i].t - prof[i - 1].t;
            const double a = (t - prof[i - 1].t) / span;
            return prof[i - 1].value + a * (prof[i].value - prof[i - 1].value);
        }
    }
    return prof.back().value;
}

double sample_load(const Scenario &sc, double t) {
    const auto &prof = sc.load_profile;
    double value = prof.front().value;
    for (const auto &p : prof) {
        if (p.t <= t)
            value = p.value;
        else
            break;
    }
    return value;
}

void validate_scenario(const Scenario &sc) {
    if (!(sc.duration > 0.0))
        throw Error(ErrorCode::validation, "duration must be positive");
    if (!(sc.Ts > 0.0))
        throw Error(ErrorCode::validation, "Ts must be positive");
    const double n = sc.duration / sc.Ts;
    if (std::abs(n - std::llround(n)) > 1e-6 || std::llround(n) < 1)
        throw Error(ErrorCode::validation,
                    "duration must be a whole number of control periods");
    if (!(sc.inverter.Vdc > 0.0))
        throw Error(ErrorCode::validation, "vdc must be positive");
    derive_params(sc.motor);
    derive_params(sc.controller_motor);
    if (!all_finite(sc.initial_state))
        throw Error(ErrorCode::validation, "initial state must be finite");

    auto check_profile = [&](const std::vector<ProfilePoint> &prof,
                             const char *what, bool must_cover_end) {
        if (prof.empty())
            throw Error(ErrorCode::validation,
                        std::string(what) + " profile must not be empty");
        if (prof.front().t != 0.0)
            throw Error(ErrorCode::validation,
                        std::string(what) + " profile must start at t = 0");
        for (size_t i = 1; i < prof.size(); ++i)
            if (!(prof[i].t > prof[i - 1].t))
                throw Error(ErrorCode::validation,
                            std::string(what) +
                                " profile times must be strictly increasing");
        if (must_cover_end && prof.back().t < sc.duration)
            throw Error(ErrorCode::validation,
                        std::string(what) + " profile must cover [0, duration]");
        for (const auto &p : prof)
            if (!std::isfinite(p.value))
                throw Error(ErrorCode::validation,
                            std::string(what) + " profile values must be finite");
    };
    check_profile(sc.speed_profile, "speed", true);
    check_profile(sc.load_profile, "load", false);

    if (sc.controller_kind == ControllerKind::enmpc)
        validate_config(sc.enmpc);
    else
        validate_dtc_config(sc.dtc);
}

Scenario scenario_from_json(const json &j) {
    if (!j.is_object())
        throw Error(ErrorCode::validation, "scenario must be a JSON object");
    reject_unknown_keys(j,
                        {"name", "duration", "Ts", "vdc", "motor",
                         "controller_motor", "initial_state", "speed_profile",
                         "load_profile", "controller", "enmpc", "dtc"},
                        "scenario");
    Scenario sc;
    sc.name = j.contains("name") ? j.at("name").get<std::string>() : "unnamed";
    sc.duration = get_number(j, "duration", 1.0);
    sc.Ts = get_number(j, "Ts", 1e-4);
    sc.inverter.Vdc = get_number(j, "vdc", 255.0);
    sc.motor = j.contains("motor")
                   ? motor_from_json(j.at("motor"), "motor")
                   : MotorParams{};
    sc.controller_motor =
        j.contains("controller_motor")
            ? motor_from_json(j.at("controller_motor"), "controller_motor")
            : sc.motor;
    sc.initial_state = j.contains("initial_state")
                           ? state_from_json(j.at("initial_state"))
                           : MotorState{};
    if (!j.contains("speed_profile") || !j.contains("load_profile"))
        throw Error(ErrorCode::validation,
                    "scenario needs speed_profile and load_profile");
    sc.speed_profile =
        profile_from_json(j.at("speed_profile"), "w", "speed_profile");
    sc.load_profile =
        profile_from_json(j.at("load_profile"), "F_L", "load_profile");

    const json ctrl = j.contains("controller") ? j.at("controller")
                                               : json{{"type", "enmpc"}};
    const std::string type =
        ctrl.contains("type") ? ctrl.at("type").get<std::string>() : "enmpc";
    if (type == "enmpc") {
        sc.controller_kind = ControllerKind::enmpc;
        sc.enmpc = enmpc_from_json(ctrl, sc.Ts);
        sc.dtc = j.contains("dtc")
                     ? dtc_from_json(j.at("dtc"), sc.motor)
                     : default_dtc_config(sc.motor, derive_params(sc.motor));
    } else if (type == "dtc") {
        sc.controller_kind = ControllerKind::dtc;
        sc.dtc = dtc_from_json(ctrl, sc.motor);
        sc.enmpc = j.contains("enmpc") ? enmpc_from_json(j.at("enmpc"), sc.Ts)
                                       : default_config(sc.Ts);
    } else {
        throw Error(ErrorCode::validation,
                    "controller.type must be 'enmpc' or 'dtc'");
    }
    return sc;
}

json scenario_to_json(const Scenario &sc) {
    json j;
    j["name"] = sc.name;
    j["duration"] = sc.duration;
    j["Ts"] = sc.Ts;
    j["vdc"] = sc.inverter.Vdc;
    j["motor"] = motor_to_json(sc.motor);
    j["controller_motor"] = motor_to_json(sc.controller_motor);
    j["initial_state"] = state_to_json(sc.initial_state);
    j["speed_profile"] = profile_to_json(sc.speed_profile, "w");
    j["load_profile"] = profile_to_json(sc.load_profile, "F_L");
    if (sc.controller_kind == ControllerKind::enmpc) {
        j["controller"] = enmpc_to_json(sc.enmpc);
        j["dtc"] = dtc_to_json(sc.dtc);
        j["dtc"].erase("type");
    } else {
        j["controller"] = dtc_to_json(sc.dtc);
        j["enmpc"] = enmpc_to_json(sc.enmpc);
        j["enmpc"].erase("type");
    }
    return j;
}

Scenario scenario_from_string(const std::string &text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCode::parse, "scenario text is not valid JSON");
    return scenario_from_json(j);
}

Scenario scenario_from_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::io, "cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_string(ss.str());
}

namespace {

Scenario make_high_speed(const std::string &name) {
    Scenario sc;
    sc.name = name;
    sc.duration = 1.0;
    sc.Ts = 1e-4;
    sc.inverter.Vdc = 255.0;
    sc.motor = MotorParams{};
    sc.controller_motor = sc.motor;
    // Start at standstill with the machine magnetized at rated secondary
    // flux (steady magnetizing current along the alpha axis).
    sc.initial_state = MotorState{sc.motor.flux_rated / sc.motor.Lm, 0.0,
                                  sc.motor.flux_rated, 0.0, 0.0};
    sc.speed_profile = {{0.0, 0.0}, {0.2, 2.0}, {1.0, 2.0}};
    sc.load_profile = {{0.0, 350.0}, {0.5, 500.0}};
    sc.controller_kind = ControllerKind::enmpc;
    sc.enmpc = default_config(sc.Ts);
    sc.dtc = default_dtc_config(sc.motor, derive_params(sc.motor));
    return sc;
}

Scenario make_low_speed(const std::string &name) {
    Scenario sc = make_high_speed(name);
    sc.speed_profile = {{0.0, 0.1}, {1.0, 0.1}};
    // Low speed leaves the back-EMF too weak to discharge the secondary
    // flux, so the controller is given a tighter operating flux ceiling;
    // the plant-side 0.45 Wb limit stays untouched. Coarse prediction
    // steps are sub-integrated for accuracy near that ceiling, and the
    // flux feedback comes from the current model, which has no Rs
    // sensitivity and stays bounded at low speed.
    sc.enmpc.lam_max = 0.085;
    for (auto &e : sc.enmpc.schedule)
        if (e.dt > sc.Ts)
            e.substeps = 4;
    sc.enmpc.flux_source = FluxSource::current_model;
    return sc;
}

} // namespace

const std::vector<std::string> &builtin_scenario_names() {
    static const std::vector<std::string> names = {
        "high-speed", "low-speed", "rs-plus-50", "rs-minus-50", "pj-sweep"};
    return names;
}

Scenario builtin_scenario(const std::string &name) {
    if (name == "high-speed")
        return make_high_speed(name);
    if (name == "low-speed")
        return make_low_speed(name);
    if (name == "rs-plus-50") {
        Scenario sc = make_low_speed(name);
        sc.motor.Rs *= 1.5; // plant only; the controller model stays nominal
        return sc;
    }
    if (name == "rs-minus-50") {
        Scenario sc = make_low_speed(name);
        sc.motor.Rs *= 0.5;
        return sc;
    }
    if (name == "pj-sweep")
        return make_high_speed(name);
    throw Error(ErrorCode::invalid_argument, "unknown builtin scenario: " + name);
}

std::vector<Scenario> shipped_scenarios() {
    std::vector<Scenario> out;
    for (const auto &n : builtin_scenario_names())
        out.push_back(builtin_scenario(n));
    return out;
}

} // namespace limsim
