#pragma once

#include "inverter.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace limsim {

// One record per control period plus a terminal record at t = duration.
struct TraceRow {
    double t = 0.0;
    double w = 0.0;
    double v = 0.0;
    double i_as = 0.0;
    double i_bs = 0.0;
    double i_1 = 0.0; // inverse Clarke of (i_as, i_bs), reporting only
    double i_2 = 0.0;
    double i_3 = 0.0;
    double lam_ar = 0.0; // plant secondary flux
    double lam_br = 0.0;
    double lam_ar_hat = 0.0; // estimator output
    double lam_br_hat = 0.0;
    double Fe = 0.0; // plant electromagnetic force
    double F_L = 0.0;
    SwitchState u;
    double E = 0.0;    // controller error sum (DTC: PI integral)
    double cost = 0.0; // best candidate cost (DTC: 0)
    int64_t evals = 0; // fully evaluated candidates (DTC: 0)
    double step_time_us = 0.0; // controller wall time; not reproducible
};

struct Trace {
    std::vector<TraceRow> rows;
};

inline constexpr int kTraceColumns = 21;
const char *trace_column_name(int index);
double trace_value(const TraceRow &row, int index);

// CSV with a fixed header; numbers are written with shortest
// round-trip formatting so parse(write(tr)) == tr bit for bit.
void write_trace(const Trace &tr, const std::string &path);
Trace read_trace(const std::string &path);

std::string format_double(double value);

} // namespace limsim
