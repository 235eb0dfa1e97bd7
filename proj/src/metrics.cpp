#include "metrics.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace limsim {

namespace {

std::vector<double> interior_events(const Scenario &sc) {
    std::set<double> ev;
    for (const auto &p : sc.speed_profile)
        if (p.t > 0.0 && p.t < sc.duration)
            ev.insert(p.t);
    for (const auto &p : sc.load_profile)
        if (p.t > 0.0 && p.t < sc.duration)
            ev.insert(p.t);
    return {ev.begin(), ev.end()};
}

} // namespace

std::vector<std::pair<double, double>> steady_segments(const Scenario &sc) {
    std::vector<std::pair<double, double>> segs;
    double prev = 0.0;
    for (double e : interior_events(sc)) {
        segs.emplace_back(e - 0.2 * (e - prev), e);
        prev = e;
    }
    segs.emplace_back(sc.duration - 0.2 * (sc.duration - prev), sc.duration);
    return segs;
}

std::vector<std::pair<std::string, double>> Metrics::items() const {
    std::vector<std::pair<std::string, double>> out;
    out.emplace_back("transitions_per_second", transitions_per_second);
    out.emplace_back("tracking_rmse", tracking_rmse);
    for (size_t i = 0; i < settling_times.size(); ++i)
        out.emplace_back("settling_time_" + std::to_string(i + 1),
                         settling_times[i]);
    out.emplace_back("force_ripple_pp", force_ripple_pp);
    out.emplace_back("max_flux", max_flux);
    out.emplace_back("max_current", max_current);
    out.emplace_back("mean_step_time_us", mean_step_time_us);
    out.emplace_back("max_step_time_us", max_step_time_us);
    return out;
}

std::string Metrics::to_kv_text() const {
    std::string s;
    for (const auto &[k, v] : items()) {
        s += k;
        s += '=';
        s += format_double(v);
        s += '\n';
    }
    return s;
}

std::string Metrics::to_csv_text() const {
    std::string header, row;
    bool first = true;
    for (const auto &[k, v] : items()) {
        if (!first) {
            header += ',';
            row += ',';
        }
        header += k;
        row += format_double(v);
        first = false;
    }
    return header + '\n' + row + '\n';
}

Metrics compute_metrics(const Trace &tr, const Scenario &sc) {
    if (tr.rows.empty())
        throw Error(ErrorCode::invalid_argument, "empty trace");
    Metrics m;
    const size_t n = tr.rows.size();

    int64_t transitions = 0;
    for (size_t k = 1; k < n; ++k)
        transitions += switch_count(tr.rows[k - 1].u, tr.rows[k].u);
    m.transitions_per_second = static_cast<double>(transitions) / sc.duration;

    const auto segs = steady_segments(sc);
    auto in_steady = [&](double t) {
        for (const auto &[a, b] : segs)
            if (t >= a && t <= b)
                return true;
        return false;
    };

    double sq = 0.0;
    size_t count = 0;
    for (const auto &r : tr.rows)
        if (in_steady(r.t)) {
            const double e = r.v - r.w;
            sq += e * e;
            ++count;
        }
    m.tracking_rmse = count ? std::sqrt(sq / count) : 0.0;

    // Peak-to-peak force within each steady segment; report the worst.
    for (const auto &[a, b] : segs) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto &r : tr.rows)
            if (r.t >= a && r.t <= b) {
                lo = std::min(lo, r.Fe);
                hi = std::max(hi, r.Fe);
            }
        if (hi >= lo)
            m.force_ripple_pp = std::max(m.force_ripple_pp, hi - lo);
    }

    // Settling after each load step: time until |v - w| re-enters and
    // stays within 1% of w through the next profile event.
    std::vector<double> load_steps;
    for (const auto &p : sc.load_profile)
        if (p.t > 0.0 && p.t < sc.duration)
            load_steps.push_back(p.t);
    const auto events = interior_events(sc);
    for (double t0 : load_steps) {
        double t_end = sc.duration;
        for (double e : events)
            if (e > t0) {
                t_end = e;
                break;
            }
        // Walk the window backwards; the band must hold from the settling
        // instant through the end of the window.
        size_t first = n, last = n;
        for (size_t k = 0; k < n; ++k)
            if (tr.rows[k].t >= t0 && tr.rows[k].t <= t_end) {
                if (first == n)
                    first = k;
                last = k;
            }
        double settle = std::numeric_limits<double>::infinity();
        if (first != n) {
            size_t k = last + 1;
            while (k > first) {
                const auto &r = tr.rows[k - 1];
                if (std::abs(r.v - r.w) > 0.01 * std::abs(r.w))
                    break;
                --k;
            }
            if (k == last + 1)
                settle = std::numeric_limits<double>::infinity(); // never inside
            else
                settle = tr.rows[k].t - t0;
        }
        m.settling_times.push_back(settle);
    }

    for (const auto &r : tr.rows) {
        m.max_flux = std::max(m.max_flux, std::hypot(r.lam_ar, r.lam_br));
        m.max_current = std::max(m.max_current, std::hypot(r.i_as, r.i_bs));
    }

    // Timing over the applied steps (the terminal record carries none).
    double sum = 0.0;
    size_t steps = 0;
    for (size_t k = 0; k + 1 < n; ++k) {
        sum += tr.rows[k].step_time_us;
        m.max_step_time_us = std::max(m.max_step_time_us, tr.rows[k].step_time_us);
        ++steps;
    }
    m.mean_step_time_us = steps ? sum / steps : 0.0;
    return m;
}

} // namespace limsim
