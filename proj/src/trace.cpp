#include "trace.hpp"

#include "error.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace limsim {

namespace {

constexpr std::array<const char *, kTraceColumns> kColumnNames = {
    "t",      "w",          "v",          "i_as",  "i_bs",   "i_1",
    "i_2",    "i_3",        "lam_ar",     "lam_br", "lam_ar_hat",
    "lam_br_hat", "Fe",     "F_L",        "u1",    "u2",     "u3",
    "E",      "cost",       "evals",      "step_time_us"};

double parse_double(std::string_view s, const std::string &path) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw Error(ErrorCode::parse, "bad number '" + std::string(s) +
                                          "' in trace file " + path);
    return v;
}

} // namespace

const char *trace_column_name(int index) {
    if (index < 0 || index >= kTraceColumns)
        throw Error(ErrorCode::invalid_argument, "trace column out of range");
    return kColumnNames[static_cast<size_t>(index)];
}

double trace_value(const TraceRow &r, int index) {
    switch (index) {
    case 0: return r.t;
    case 1: return r.w;
    case 2: return r.v;
    case 3: return r.i_as;
    case 4: return r.i_bs;
    case 5: return r.i_1;
    case 6: return r.i_2;
    case 7: return r.i_3;
    case 8: return r.lam_ar;
    case 9: return r.lam_br;
    case 10: return r.lam_ar_hat;
    case 11: return r.lam_br_hat;
    case 12: return r.Fe;
    case 13: return r.F_L;
    case 14: return r.u.u1;
    case 15: return r.u.u2;
    case 16: return r.u.u3;
    case 17: return r.E;
    case 18: return r.cost;
    case 19: return static_cast<double>(r.evals);
    case 20: return r.step_time_us;
    default:
        throw Error(ErrorCode::invalid_argument, "trace column out of range");
    }
}

std::string format_double(double value) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, r.ptr);
}

void write_trace(const Trace &tr, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::io, "cannot open trace file for writing: " + path);

    std::string line;
    for (int c = 0; c < kTraceColumns; ++c) {
        if (c)
            line += ',';
        line += kColumnNames[static_cast<size_t>(c)];
    }
    line += '\n';
    out << line;

    char buf[32];
    for (const auto &r : tr.rows) {
        line.clear();
        for (int c = 0; c < kTraceColumns; ++c) {
            if (c)
                line += ',';
            if (c >= 14 && c <= 16) {
                line += (trace_value(r, c) != 0.0) ? '1' : '0';
            } else if (c == 19) {
                const auto res = std::to_chars(buf, buf + sizeof(buf), r.evals);
                line.append(buf, res.ptr);
            } else {
                const auto res =
                    std::to_chars(buf, buf + sizeof(buf), trace_value(r, c));
                line.append(buf, res.ptr);
            }
        }
        line += '\n';
        out << line;
    }
    if (!out)
        throw Error(ErrorCode::io, "failed writing trace file: " + path);
}

Trace read_trace(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io, "cannot open trace file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::parse, "empty trace file: " + path);

    Trace tr;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        TraceRow r;
        size_t pos = 0;
        for (int c = 0; c < kTraceColumns; ++c) {
            size_t next = line.find(',', pos);
            if (next == std::string::npos)
                next = line.size();
            const std::string_view field(line.data() + pos, next - pos);
            const double v = parse_double(field, path);
            switch (c) {
            case 0: r.t = v; break;
            case 1: r.w = v; break;
            case 2: r.v = v; break;
            case 3: r.i_as = v; break;
            case 4: r.i_bs = v; break;
            case 5: r.i_1 = v; break;
            case 6: r.i_2 = v; break;
            case 7: r.i_3 = v; break;
            case 8: r.lam_ar = v; break;
            case 9: r.lam_br = v; break;
            case 10: r.lam_ar_hat = v; break;
            case 11: r.lam_br_hat = v; break;
            case 12: r.Fe = v; break;
            case 13: r.F_L = v; break;
            case 14: r.u.u1 = v != 0.0; break;
            case 15: r.u.u2 = v != 0.0; break;
            case 16: r.u.u3 = v != 0.0; break;
            case 17: r.E = v; break;
            case 18: r.cost = v; break;
            case 19: r.evals = static_cast<int64_t>(v); break;
            case 20: r.step_time_us = v; break;
            }
            pos = next + 1;
        }
        tr.rows.push_back(r);
    }
    return tr;
}

} // namespace limsim
