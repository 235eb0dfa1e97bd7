// Command-line front end for the limsim shared library. Talks to the
// library exclusively through the public C API.

#include "limsim.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace {

struct ScenarioDeleter {
    void operator()(limsim_scenario *p) const { limsim_scenario_free(p); }
};
struct ResultDeleter {
    void operator()(limsim_result *p) const { limsim_result_free(p); }
};
using ScenarioPtr = std::unique_ptr<limsim_scenario, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<limsim_result, ResultDeleter>;

[[noreturn]] void fail(limsim_status st, const std::string &context) {
    std::fprintf(stderr, "limsim-cli: %s: %s (%s)\n", context.c_str(),
                 limsim_last_error(), limsim_status_name(st));
    std::exit(1);
}

void check(limsim_status st, const std::string &context) {
    if (st != LIMSIM_OK)
        fail(st, context);
}

// A scenario argument is a file path or a built-in name.
ScenarioPtr load_scenario(const std::string &spec) {
    limsim_scenario *sc = nullptr;
    if (std::filesystem::exists(spec)) {
        check(limsim_scenario_load_file(spec.c_str(), &sc),
              "loading scenario file '" + spec + "'");
        return ScenarioPtr(sc);
    }
    const limsim_status st = limsim_scenario_builtin(spec.c_str(), &sc);
    if (st != LIMSIM_OK)
        fail(st, "'" + spec + "' is neither a file nor a built-in scenario");
    return ScenarioPtr(sc);
}

void apply_sets(limsim_scenario *sc, const std::vector<std::string> &sets) {
    for (const auto &kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            fail(LIMSIM_ERR_INVALID_ARGUMENT,
                 "--set expects key=value, got '" + kv + "'");
        check(limsim_scenario_set(sc, kv.substr(0, eq).c_str(),
                                  kv.substr(eq + 1).c_str()),
              "setting '" + kv + "'");
    }
}

ResultPtr run_scenario(const limsim_scenario *sc) {
    limsim_result *res = nullptr;
    check(limsim_run(sc, &res), "running scenario");
    return ResultPtr(res);
}

std::string metrics_text(const limsim_result *res, const std::string &fmt) {
    size_t needed = 0;
    check(limsim_result_metrics_text(res, fmt.c_str(), nullptr, 0, &needed),
          "formatting metrics");
    std::string text(needed, '\0');
    check(limsim_result_metrics_text(res, fmt.c_str(), text.data(), needed,
                                     nullptr),
          "formatting metrics");
    text.resize(needed - 1);
    return text;
}

double metric(const limsim_result *res, const char *name) {
    double v = 0.0;
    check(limsim_result_metric_get(res, name, &v), std::string("metric ") + name);
    return v;
}

int find_column(const limsim_result *res, const std::string &name) {
    int ncols = 0;
    check(limsim_result_trace_column_count(res, &ncols), "trace columns");
    for (int c = 0; c < ncols; ++c) {
        const char *n = nullptr;
        check(limsim_result_trace_column_name(res, c, &n), "trace column name");
        if (name == n)
            return c;
    }
    fail(LIMSIM_ERR_INVALID_ARGUMENT, "no trace column named " + name);
}

int cmd_run(const std::string &spec, const std::string &out_path,
            const std::string &metrics_path, const std::string &metrics_format,
            const std::vector<std::string> &sets,
            const std::string &controller) {
    ScenarioPtr sc = load_scenario(spec);
    if (!controller.empty())
        check(limsim_scenario_select_controller(sc.get(), controller.c_str()),
              "selecting controller '" + controller + "'");
    apply_sets(sc.get(), sets);
    check(limsim_scenario_validate(sc.get()), "validating scenario");
    ResultPtr res = run_scenario(sc.get());
    check(limsim_result_write_trace(res.get(), out_path.c_str()),
          "writing trace '" + out_path + "'");
    const std::string text = metrics_text(res.get(), metrics_format);
    if (metrics_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        FILE *f = std::fopen(metrics_path.c_str(), "wb");
        if (!f)
            fail(LIMSIM_ERR_IO, "cannot open metrics file '" + metrics_path + "'");
        std::fputs(text.c_str(), f);
        std::fclose(f);
    }
    return 0;
}

int cmd_compare(const std::string &spec, const std::vector<std::string> &sets) {
    ScenarioPtr base = load_scenario(spec);
    apply_sets(base.get(), sets);

    ScenarioPtr enmpc_sc(nullptr), dtc_sc(nullptr);
    {
        limsim_scenario *p = nullptr;
        check(limsim_scenario_clone(base.get(), &p), "clone");
        enmpc_sc.reset(p);
        check(limsim_scenario_select_controller(enmpc_sc.get(), "enmpc"),
              "selecting enmpc");
        p = nullptr;
        check(limsim_scenario_clone(base.get(), &p), "clone");
        dtc_sc.reset(p);
        check(limsim_scenario_select_controller(dtc_sc.get(), "dtc"),
              "selecting dtc");
    }
    ResultPtr a = run_scenario(enmpc_sc.get());
    ResultPtr b = run_scenario(dtc_sc.get());

    int count = 0;
    check(limsim_result_metric_count(a.get(), &count), "metric count");
    std::printf("%-24s %16s %16s\n", "metric", "enmpc", "dtc");
    for (int i = 0; i < count; ++i) {
        const char *name = nullptr;
        check(limsim_result_metric_name(a.get(), i, &name), "metric name");
        double va = 0.0, vb = 0.0;
        check(limsim_result_metric_get(a.get(), name, &va), "metric value");
        if (limsim_result_metric_get(b.get(), name, &vb) != LIMSIM_OK)
            vb = 0.0;
        std::printf("%-24s %16.6g %16.6g\n", name, va, vb);
    }
    const double ta = metric(a.get(), "transitions_per_second");
    const double tb = metric(b.get(), "transitions_per_second");
    std::printf("switching ratio (dtc/enmpc): %.2f\n", ta > 0.0 ? tb / ta : 0.0);
    return 0;
}

int cmd_sweep(const std::string &spec, const std::string &param,
              const std::string &values, const std::vector<std::string> &sets) {
    ScenarioPtr base = load_scenario(spec);
    apply_sets(base.get(), sets);

    std::vector<std::string> vals;
    size_t pos = 0;
    while (pos <= values.size()) {
        size_t next = values.find(',', pos);
        if (next == std::string::npos)
            next = values.size();
        vals.push_back(values.substr(pos, next - pos));
        if (next == values.size())
            break;
        pos = next + 1;
    }
    if (vals.empty())
        fail(LIMSIM_ERR_INVALID_ARGUMENT, "--values must not be empty");

    bool header = false;
    for (const auto &v : vals) {
        limsim_scenario *p = nullptr;
        check(limsim_scenario_clone(base.get(), &p), "clone");
        ScenarioPtr sc(p);
        check(limsim_scenario_set(sc.get(), param.c_str(), v.c_str()),
              "setting " + param + "=" + v);
        check(limsim_scenario_validate(sc.get()), "validating scenario");
        ResultPtr res = run_scenario(sc.get());
        const std::string csv = metrics_text(res.get(), "csv");
        const auto nl = csv.find('\n');
        if (!header) {
            std::printf("%s,%s\n", param.c_str(), csv.substr(0, nl).c_str());
            header = true;
        }
        std::string row = csv.substr(nl + 1);
        if (!row.empty() && row.back() == '\n')
            row.pop_back();
        std::printf("%s,%s\n", v.c_str(), row.c_str());
    }
    return 0;
}

int cmd_validate(const std::string &spec) {
    ScenarioPtr sc = load_scenario(spec);
    check(limsim_scenario_validate(sc.get()), "validating scenario");
    const char *name = nullptr;
    check(limsim_scenario_name(sc.get(), &name), "scenario name");
    std::printf("scenario '%s' is valid\n", name);
    return 0;
}

int cmd_bench(const std::string &spec, const std::vector<std::string> &sets) {
    ScenarioPtr sc = load_scenario(spec);
    apply_sets(sc.get(), sets);
    ResultPtr res = run_scenario(sc.get());

    int64_t rows = 0;
    check(limsim_result_trace_rows(res.get(), &rows), "trace rows");
    const int col = find_column(res.get(), "step_time_us");
    std::vector<double> us;
    us.reserve(static_cast<size_t>(rows));
    for (int64_t r = 0; r + 1 < rows; ++r) { // skip the terminal record
        double v = 0.0;
        check(limsim_result_trace_get(res.get(), r, col, &v), "trace value");
        us.push_back(v);
    }
    std::sort(us.begin(), us.end());
    auto pct = [&](double q) {
        const size_t idx = static_cast<size_t>(q * (us.size() - 1));
        return us[idx];
    };
    const double mean = metric(res.get(), "mean_step_time_us");
    std::printf("controller steps: %zu\n", us.size());
    std::printf("per-step time [us]: mean=%.2f p50=%.2f p90=%.2f p99=%.2f max=%.2f\n",
                mean, pct(0.50), pct(0.90), pct(0.99), us.back());
    if (mean >= 100.0)
        std::fprintf(stderr,
                     "warning: mean controller step time %.1f us is above the "
                     "100 us target on this machine\n",
                     mean);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Closed-loop LIM drive simulation: enumerative MPC and DTC"};
    app.require_subcommand(1);

    std::string spec, out_path, metrics_path, metrics_format = "kv";
    std::string param, values, controller;
    std::vector<std::string> sets;

    auto *run = app.add_subcommand("run", "Run one scenario and write the trace");
    run->add_option("--scenario", spec, "Scenario file or built-in name")
        ->required();
    run->add_option("--out", out_path, "Trace CSV output path")->required();
    run->add_option("--metrics", metrics_path,
                    "Metrics output path (default: stdout)");
    run->add_option("--metrics-format", metrics_format, "kv or csv")
        ->check(CLI::IsMember({"kv", "csv"}));
    run->add_option("--set", sets, "Override key=value (repeatable)");
    run->add_option("--controller", controller,
                    "Force the controller type (enmpc or dtc)")
        ->check(CLI::IsMember({"enmpc", "dtc"}));

    auto *cmp = app.add_subcommand(
        "compare", "Run ENMPC and DTC on the same plant, print a metric table");
    cmp->add_option("--scenario", spec, "Scenario file or built-in name")
        ->required();
    cmp->add_option("--set", sets, "Override key=value (repeatable)");

    auto *swp = app.add_subcommand(
        "sweep", "Run the scenario once per value of one parameter");
    swp->add_option("--scenario", spec, "Scenario file or built-in name")
        ->required();
    swp->add_option("--param", param, "Dotted key, e.g. controller.P_sw.0")
        ->required();
    swp->add_option("--values", values, "Comma-separated values")->required();
    swp->add_option("--set", sets, "Override key=value (repeatable)");

    auto *val = app.add_subcommand("validate", "Check scenario invariants");
    val->add_option("--scenario", spec, "Scenario file or built-in name")
        ->required();

    auto *ben = app.add_subcommand(
        "bench", "Report the controller's per-step latency distribution");
    ben->add_option("--scenario", spec, "Scenario file or built-in name");
    ben->add_option("--set", sets, "Override key=value (repeatable)");

    auto *lst = app.add_subcommand("scenarios", "List built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return cmd_run(spec, out_path, metrics_path, metrics_format, sets, controller);
    if (cmp->parsed())
        return cmd_compare(spec, sets);
    if (swp->parsed())
        return cmd_sweep(spec, param, values, sets);
    if (val->parsed())
        return cmd_validate(spec);
    if (ben->parsed())
        return cmd_bench(spec.empty() ? "high-speed" : spec, sets);
    if (lst->parsed()) {
        for (int i = 0; i < limsim_builtin_count(); ++i)
            std::printf("%s\n", limsim_builtin_name(i));
        return 0;
    }
    return 1;
}
