#pragma once

#include "scenario.hpp"
#include "trace.hpp"

#include <string>
#include <utility>
#include <vector>

namespace limsim {

struct Metrics {
    double transitions_per_second = 0.0; // switch-leg toggles summed / duration
    double tracking_rmse = 0.0;          // RMS of v - w over steady segments
    std::vector<double> settling_times;  // one per load step, +inf if never
    double force_ripple_pp = 0.0; // worst per-segment peak-to-peak of Fe
    double max_flux = 0.0;        // plant-side, whole run
    double max_current = 0.0;
    double mean_step_time_us = 0.0;
    double max_step_time_us = 0.0;

    // Flat key/value view in a fixed order, for text output and the C API.
    std::vector<std::pair<std::string, double>> items() const;
    std::string to_kv_text() const;
    std::string to_csv_text() const;
};

// Steady measurement windows: the last 20% of the span before each
// interior profile event plus the last 20% of the run.
std::vector<std::pair<double, double>> steady_segments(const Scenario &sc);

Metrics compute_metrics(const Trace &tr, const Scenario &sc);

} // namespace limsim
