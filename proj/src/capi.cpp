#include "limsim.h"

#include "error.hpp"
#include "harness.hpp"
#include "scenario.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <string>

using nlohmann::json;

namespace {

thread_local std::string g_last_error = "no error";

limsim_status set_error(limsim_status code, const std::string &msg) {
    g_last_error = msg;
    return code;
}

limsim_status from_exception() {
    try {
        throw;
    } catch (const limsim::Error &e) {
        switch (e.code()) {
        case limsim::ErrorCode::invalid_argument:
            return set_error(LIMSIM_ERR_INVALID_ARGUMENT, e.what());
        case limsim::ErrorCode::parse:
            return set_error(LIMSIM_ERR_PARSE, e.what());
        case limsim::ErrorCode::validation:
            return set_error(LIMSIM_ERR_VALIDATION, e.what());
        case limsim::ErrorCode::io:
            return set_error(LIMSIM_ERR_IO, e.what());
        case limsim::ErrorCode::numeric:
            return set_error(LIMSIM_ERR_NUMERIC, e.what());
        case limsim::ErrorCode::unknown_key:
            return set_error(LIMSIM_ERR_UNKNOWN_KEY, e.what());
        case limsim::ErrorCode::internal:
            return set_error(LIMSIM_ERR_INTERNAL, e.what());
        }
        return set_error(LIMSIM_ERR_INTERNAL, e.what());
    } catch (const std::exception &e) {
        return set_error(LIMSIM_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(LIMSIM_ERR_INTERNAL, "unknown error");
    }
}

json pointer_from_dotted(const std::string &dotted) {
    std::string ptr;
    size_t pos = 0;
    while (pos <= dotted.size()) {
        size_t next = dotted.find('.', pos);
        if (next == std::string::npos)
            next = dotted.size();
        std::string seg = dotted.substr(pos, next - pos);
        if (seg.empty())
            throw limsim::Error(limsim::ErrorCode::invalid_argument,
                                "empty segment in key path '" + dotted + "'");
        ptr += '/';
        ptr += seg;
        if (next == dotted.size())
            break;
        pos = next + 1;
    }
    return json::json_pointer(ptr);
}

} // namespace

struct limsim_scenario {
    // The scenario is held as its canonical JSON document so overrides by
    // key path stay simple; the typed struct is rebuilt on demand.
    json doc;
    std::string name_cache;
    std::string json_cache;
};

struct limsim_result {
    limsim::Trace trace;
    limsim::Metrics metrics;
    std::vector<std::pair<std::string, double>> metric_items;
};

extern "C" {

const char *limsim_version(void) { return "1.0.0"; }

const char *limsim_status_name(limsim_status status) {
    switch (status) {
    case LIMSIM_OK: return "ok";
    case LIMSIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LIMSIM_ERR_PARSE: return "parse error";
    case LIMSIM_ERR_VALIDATION: return "validation error";
    case LIMSIM_ERR_IO: return "i/o error";
    case LIMSIM_ERR_NUMERIC: return "numeric error";
    case LIMSIM_ERR_UNKNOWN_KEY: return "unknown key";
    case LIMSIM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char *limsim_last_error(void) { return g_last_error.c_str(); }

limsim_status limsim_scenario_load_string(const char *json_text,
                                          limsim_scenario **out) {
    if (!json_text || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        json j = json::parse(json_text, nullptr, false);
        if (j.is_discarded())
            throw limsim::Error(limsim::ErrorCode::parse,
                                "scenario text is not valid JSON");
        // Round-trip through the typed representation: fills defaults and
        // rejects unknown keys, giving a canonical document.
        limsim::Scenario sc = limsim::scenario_from_json(j);
        auto *handle = new limsim_scenario;
        handle->doc = limsim::scenario_to_json(sc);
        *out = handle;
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

limsim_status limsim_scenario_load_file(const char *path,
                                        limsim_scenario **out) {
    if (!path || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        limsim::Scenario sc = limsim::scenario_from_file(path);
        auto *handle = new limsim_scenario;
        handle->doc = limsim::scenario_to_json(sc);
        *out = handle;
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

limsim_status limsim_scenario_builtin(const char *name, limsim_scenario **out) {
    if (!name || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        limsim::Scenario sc = limsim::builtin_scenario(name);
        auto *handle = new limsim_scenario;
        handle->doc = limsim::scenario_to_json(sc);
        *out = handle;
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

int limsim_builtin_count(void) {
    return static_cast<int>(limsim::builtin_scenario_names().size());
}

const char *limsim_builtin_name(int index) {
    const auto &names = limsim::builtin_scenario_names();
    if (index < 0 || index >= static_cast<int>(names.size()))
        return nullptr;
    return names[static_cast<size_t>(index)].c_str();
}

limsim_status limsim_scenario_set(limsim_scenario *sc, const char *dotted_key,
                                  const char *value) {
    if (!sc || !dotted_key || !value)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const json ptr = pointer_from_dotted(dotted_key);
        const auto jp = json::json_pointer(ptr.get<std::string>());
        if (!sc->doc.contains(jp))
            throw limsim::Error(limsim::ErrorCode::unknown_key,
                                std::string("no such scenario key: ") +
                                    dotted_key);
        json v = json::parse(value, nullptr, false);
        if (v.is_discarded())
            v = std::string(value); // bare words become strings
        sc->doc[jp] = v;
        // Re-canonicalize so follow-up validation sees the typed view.
        limsim::Scenario parsed = limsim::scenario_from_json(sc->doc);
        sc->doc = limsim::scenario_to_json(parsed);
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

limsim_status limsim_scenario_select_controller(limsim_scenario *sc,
                                                const char *type) {
    if (!sc || !type)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const std::string want(type);
        if (want != "enmpc" && want != "dtc")
            throw limsim::Error(limsim::ErrorCode::invalid_argument,
                                "controller type must be 'enmpc' or 'dtc'");
        limsim::Scenario parsed = limsim::scenario_from_json(sc->doc);
        parsed.controller_kind = (want == "enmpc")
                                     ? limsim::ControllerKind::enmpc
                                     : limsim::ControllerKind::dtc;
        sc->doc = limsim::scenario_to_json(parsed);
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

limsim_status limsim_scenario_clone(const limsim_scenario *sc,
                                    limsim_scenario **out) {
    if (!sc || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    auto *handle = new limsim_scenario;
    handle->doc = sc->doc;
    *out = handle;
    return LIMSIM_OK;
}

limsim_status limsim_scenario_validate(const limsim_scenario *sc) {
    if (!sc)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        limsim::validate_scenario(limsim::scenario_from_json(sc->doc));
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

limsim_status limsim_scenario_name(const limsim_scenario *sc,
                                   const char **out) {
    if (!sc || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        auto *mut = const_cast<limsim_scenario *>(sc);
        mut->name_cache = sc->doc.value("name", "unnamed");
        *out = mut->name_cache.c_str();
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

limsim_status limsim_scenario_json(limsim_scenario *sc, const char **out) {
    if (!sc || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        sc->json_cache = sc->doc.dump(2);
        *out = sc->json_cache.c_str();
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

void limsim_scenario_free(limsim_scenario *sc) { delete sc; }

limsim_status limsim_run(const limsim_scenario *sc, limsim_result **out) {
    if (!sc || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        limsim::Scenario parsed = limsim::scenario_from_json(sc->doc);
        limsim::RunResult rr = limsim::run(parsed);
        auto *res = new limsim_result;
        res->trace = std::move(rr.trace);
        res->metrics = std::move(rr.metrics);
        res->metric_items = res->metrics.items();
        *out = res;
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

limsim_status limsim_result_write_trace(const limsim_result *res,
                                        const char *path) {
    if (!res || !path)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        limsim::write_trace(res->trace, path);
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

limsim_status limsim_result_metric_count(const limsim_result *res, int *out) {
    if (!res || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    *out = static_cast<int>(res->metric_items.size());
    return LIMSIM_OK;
}

limsim_status limsim_result_metric_name(const limsim_result *res, int index,
                                        const char **out) {
    if (!res || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    if (index < 0 || index >= static_cast<int>(res->metric_items.size()))
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "metric index out of range");
    *out = res->metric_items[static_cast<size_t>(index)].first.c_str();
    return LIMSIM_OK;
}

limsim_status limsim_result_metric_get(const limsim_result *res,
                                       const char *name, double *out) {
    if (!res || !name || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    for (const auto &[k, v] : res->metric_items)
        if (k == name) {
            *out = v;
            return LIMSIM_OK;
        }
    return set_error(LIMSIM_ERR_INVALID_ARGUMENT,
                     std::string("no such metric: ") + name);
}

limsim_status limsim_result_metrics_text(const limsim_result *res,
                                         const char *format, char *buf,
                                         size_t cap, size_t *needed) {
    if (!res || !format)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const std::string fmt(format);
        std::string text;
        if (fmt == "kv")
            text = res->metrics.to_kv_text();
        else if (fmt == "csv")
            text = res->metrics.to_csv_text();
        else
            throw limsim::Error(limsim::ErrorCode::invalid_argument,
                                "metrics format must be 'kv' or 'csv'");
        if (needed)
            *needed = text.size() + 1;
        if (buf && cap > 0) {
            const size_t ncopy = std::min(cap - 1, text.size());
            std::memcpy(buf, text.data(), ncopy);
            buf[ncopy] = '\0';
        }
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

limsim_status limsim_result_trace_rows(const limsim_result *res, int64_t *out) {
    if (!res || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    *out = static_cast<int64_t>(res->trace.rows.size());
    return LIMSIM_OK;
}

limsim_status limsim_result_trace_column_count(const limsim_result *res,
                                               int *out) {
    if (!res || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    *out = limsim::kTraceColumns;
    return LIMSIM_OK;
}

limsim_status limsim_result_trace_column_name(const limsim_result *res,
                                              int index, const char **out) {
    if (!res || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    try {
        *out = limsim::trace_column_name(index);
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

limsim_status limsim_result_trace_get(const limsim_result *res, int64_t row,
                                      int column, double *out) {
    if (!res || !out)
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "null argument");
    if (row < 0 || row >= static_cast<int64_t>(res->trace.rows.size()))
        return set_error(LIMSIM_ERR_INVALID_ARGUMENT, "trace row out of range");
    try {
        *out = limsim::trace_value(res->trace.rows[static_cast<size_t>(row)],
                                   column);
        return LIMSIM_OK;
    } catch (...) {
        return from_exception();
    }
}

void limsim_result_free(limsim_result *res) { delete res; }

} // extern "C"
