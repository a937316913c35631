// Command-line front end: run scenarios, audit traces, list builtins, and
// sweep team sizes for timing.

#include <cstdio>
#include <exception>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrvo/sim.hpp"
#include "vrvo/trace_io.hpp"

namespace {

using namespace vrvo;

struct ScenarioArgs {
    std::string builtin = "circle";
    std::string file;
    int agents = 10;
    double circle_radius = 0.0;
    int pairs = 4;
    double lane_gap = 1.5;
};

struct OverrideArgs {
    std::string model;
    std::string method;
    std::string deadlock;
    std::string apex_mode;
    int max_ticks = -1;
    double v_max = -1.0, a_max = -1.0, t_h = -1.0, dt = -1.0;
    double sigma = -1.0, tau = -2.0, si_slow_radius = -1.0;
    double eps_p = -1.0, eps_v = -1.0, sensing_radius = -1.0, workspace = -1.0;
    int deadlock_patience = -1;
    double orca_tau = -1.0;
};

Scenario build_scenario(const ScenarioArgs& s, const OverrideArgs& o) {
    Scenario sc;
    if (!s.file.empty()) {
        sc = load_scenario(s.file);
    } else if (s.builtin == "circle") {
        sc = make_circle_scenario(s.agents, s.circle_radius);
    } else if (s.builtin == "pairs") {
        sc = make_pairs_scenario(s.pairs, s.lane_gap);
    } else if (s.builtin == "two_vs_one") {
        sc = make_two_vs_one_scenario();
    } else if (s.builtin == "grid16") {
        sc = make_grid_formation_scenario();
    } else {
        throw std::runtime_error("unknown scenario '" + s.builtin +
                                 "' (try: circle, pairs, two_vs_one, grid16)");
    }

    if (o.model == "si") sc.model = Model::SingleIntegrator;
    else if (o.model == "di") sc.model = Model::DoubleIntegrator;
    else if (!o.model.empty()) throw std::runtime_error("--model must be si or di");
    if (o.method == "vrvo") sc.method = Method::Vrvo;
    else if (o.method == "orca") sc.method = Method::Orca;
    else if (!o.method.empty()) throw std::runtime_error("--method must be vrvo or orca");
    if (o.deadlock == "on") sc.deadlock_enabled = true;
    else if (o.deadlock == "off") sc.deadlock_enabled = false;
    else if (!o.deadlock.empty()) throw std::runtime_error("--deadlock must be on or off");
    if (o.apex_mode == "rvo") sc.config.apex_mode = ApexMode::Rvo;
    else if (o.apex_mode == "vo_center") sc.config.apex_mode = ApexMode::VoCenter;
    else if (!o.apex_mode.empty()) throw std::runtime_error("--apex-mode must be rvo or vo_center");

    if (o.max_ticks > 0) sc.max_ticks = o.max_ticks;
    if (o.v_max > 0.0) sc.limits.v_max = o.v_max;
    if (o.a_max > 0.0) sc.limits.a_max = o.a_max;
    if (o.t_h > 0.0) sc.limits.t_h = o.t_h;
    if (o.dt > 0.0) sc.limits.dt = o.dt;
    if (o.sigma > 0.0) sc.config.sigma = o.sigma;
    if (o.tau > -1.5) {
        sc.config.tau = o.tau > 0.0 ? o.tau : std::numeric_limits<double>::infinity();
    }
    if (o.si_slow_radius > 0.0) sc.config.si_slow_radius = o.si_slow_radius;
    if (o.eps_p > 0.0) sc.config.eps_p = o.eps_p;
    if (o.eps_v > 0.0) sc.config.eps_v = o.eps_v;
    if (o.sensing_radius > 0.0) sc.config.sensing_radius = o.sensing_radius;
    if (o.workspace > 0.0) sc.config.workspace_half_extent = o.workspace;
    if (o.deadlock_patience > 0) sc.config.deadlock_patience = o.deadlock_patience;
    if (o.orca_tau > 0.0) sc.orca_tau = o.orca_tau;

    std::string why;
    if (!sc.valid(&why)) throw std::runtime_error("invalid scenario: " + why);
    return sc;
}

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& s, OverrideArgs& o) {
    cmd->add_option("--scenario", s.builtin, "builtin scenario: circle, pairs, two_vs_one, grid16");
    cmd->add_option("--file", s.file, "scenario JSON file (overrides --scenario)");
    cmd->add_option("--agents", s.agents, "agent count for the circle scenario");
    cmd->add_option("--circle-radius", s.circle_radius, "circle radius [m], 0 = per-count default");
    cmd->add_option("--pairs", s.pairs, "pair count for the pairs scenario");
    cmd->add_option("--lane-gap", s.lane_gap, "lane spacing for the pairs scenario [m]");
    cmd->add_option("--model", o.model, "dynamics: si or di");
    cmd->add_option("--method", o.method, "planner: vrvo or orca");
    cmd->add_option("--deadlock", o.deadlock, "deadlock resolution: on or off");
    cmd->add_option("--max-ticks", o.max_ticks, "tick budget");
    cmd->add_option("--v-max", o.v_max, "speed limit [m/s]");
    cmd->add_option("--a-max", o.a_max, "acceleration limit [m/s^2]");
    cmd->add_option("--t-h", o.t_h, "planning horizon [s]");
    cmd->add_option("--dt", o.dt, "simulation step [s]");
    cmd->add_option("--sigma", o.sigma, "cone superposition scale [s]");
    cmd->add_option("--apex-mode", o.apex_mode, "cone apex: rvo or vo_center");
    cmd->add_option("--tau", o.tau, "cone horizon [s], 0 = untruncated");
    cmd->add_option("--si-slow-radius", o.si_slow_radius, "proportional-control radius [m]");
    cmd->add_option("--eps-p", o.eps_p, "goal tolerance [m]");
    cmd->add_option("--eps-v", o.eps_v, "rest tolerance [m/s]");
    cmd->add_option("--sensing-radius", o.sensing_radius, "neighbor sensing radius [m]");
    cmd->add_option("--workspace", o.workspace, "workspace half extent [m]");
    cmd->add_option("--deadlock-patience", o.deadlock_patience, "stall ticks before deadlock");
    cmd->add_option("--orca-tau", o.orca_tau, "time horizon for the orca baseline [s]");
}

int cmd_run(const ScenarioArgs& s, const OverrideArgs& o, const std::string& out_path,
            const std::string& metrics_path, const std::string& format,
            const std::string& save_path) {
    Scenario sc = build_scenario(s, o);
    if (!save_path.empty()) save_scenario(sc, save_path);

    SimResult result = run(sc);
    const RunMetrics& m = result.metrics;

    if (!out_path.empty()) {
        if (format == "csv") {
            write_trace_csv(out_path, result.trace);
        } else {
            write_trace_jsonl(out_path, sc, result.trace);
        }
    }
    if (!metrics_path.empty()) write_metrics_json(m, metrics_path);

    std::printf("scenario        %s (%s, %s, deadlock %s)\n", sc.name.c_str(),
                to_string(sc.model), to_string(sc.method), sc.deadlock_enabled ? "on" : "off");
    std::printf("ticks           %d\n", m.ticks_run);
    std::printf("arrived         %d/%zu%s\n", m.arrived_count, sc.agents.size(),
                m.all_arrived ? "" : " (incomplete)");
    std::printf("collisions      %d\n", m.collision_count);
    std::printf("min separation  %.6f m\n", m.min_separation);
    std::printf("makespan        %d ticks\n", m.makespan_ticks);
    std::printf("step time       mean %.3f ms, max %.3f ms\n", m.mean_step_ms, m.max_step_ms);
    std::printf("deadlock        detected %d, resolved %d, aborted %d\n", m.deadlock.detected,
                m.deadlock.resolved, m.deadlock.aborted);
    return exit_code_for(m);
}

int cmd_audit(const std::string& trace_path) {
    auto [scenario, trace] = read_trace_jsonl(trace_path);
    AuditReport report = audit_trace(scenario, trace);
    std::printf("ticks                    %d\n", report.ticks);
    std::printf("min separation           %.6f m\n", report.min_separation);
    std::printf("separation violations    %d\n", report.collision_events);
    std::printf("containment violations   %d\n", report.containment_violations);
    std::printf("hold-movement violations %d\n", report.hold_move_violations);
    if (report.first_violation_tick >= 0) {
        std::printf("first violation at tick  %d\n", report.first_violation_tick);
    }
    std::printf("verdict                  %s\n", report.ok() ? "clean" : "VIOLATIONS");
    return report.ok() ? 0 : 1;
}

int cmd_scenarios() {
    for (const Scenario& sc : builtin_scenarios()) {
        std::printf("%-10s %3zu agents", sc.name.c_str(), sc.agents.size());
        if (sc.name.rfind("circle", 0) == 0) std::printf("  (antipodal goals)");
        if (sc.name.rfind("pairs", 0) == 0) std::printf("  (head-on lanes)");
        if (sc.name == "grid16") std::printf("  (perimeter to 4x4 grid, 1.25 m spacing)");
        std::printf("\n");
    }
    return 0;
}

int cmd_bench(std::vector<int> sizes, int ticks, const std::string& json_out) {
    if (sizes.empty()) sizes = {5, 10, 20, 40, 70};
    std::printf("%6s %12s %12s %10s\n", "agents", "vrvo [ms]", "orca [ms]", "ratio");
    std::string json = "[";
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        int n = sizes[i];
        Scenario sc = make_circle_scenario(n);
        sc.model = Model::DoubleIntegrator;
        sc.max_ticks = ticks;

        sc.method = Method::Vrvo;
        RunMetrics rv = run(sc).metrics;
        sc.method = Method::Orca;
        RunMetrics ro = run(sc).metrics;

        double ratio = ro.mean_step_ms > 0.0 ? rv.mean_step_ms / ro.mean_step_ms : 0.0;
        std::printf("%6d %12.4f %12.4f %9.2fx\n", n, rv.mean_step_ms, ro.mean_step_ms, ratio);
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%s{\"agents\":%d,\"vrvo_ms\":%.6f,\"orca_ms\":%.6f}", i ? "," : "", n,
                      rv.mean_step_ms, ro.mean_step_ms);
        json += buf;
    }
    json += "]";
    if (!json_out.empty()) {
        FILE* f = std::fopen(json_out.c_str(), "w");
        if (!f) {
            std::fprintf(stderr, "cannot write %s\n", json_out.c_str());
            return 1;
        }
        std::fprintf(f, "%s\n", json.c_str());
        std::fclose(f);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized multi-agent collision avoidance sandbox"};
    app.require_subcommand(1);

    ScenarioArgs sargs;
    OverrideArgs oargs;
    std::string out_path, metrics_path, save_path;
    std::string format = "jsonl";

    CLI::App* run_cmd = app.add_subcommand("run", "simulate a scenario and emit trace/metrics");
    add_scenario_flags(run_cmd, sargs, oargs);
    run_cmd->add_option("--out", out_path, "trace output path");
    run_cmd->add_option("--metrics", metrics_path, "metrics JSON output path");
    run_cmd->add_option("--format", format, "trace format: jsonl or csv");
    run_cmd->add_option("--save-scenario", save_path, "write the resolved scenario JSON");

    std::string trace_path;
    CLI::App* audit_cmd = app.add_subcommand("audit", "verify safety invariants of a trace");
    audit_cmd->add_option("trace", trace_path, "trace file (jsonl)")->required();

    CLI::App* scenarios_cmd = app.add_subcommand("scenarios", "list builtin scenarios");

    std::vector<int> bench_sizes;
    int bench_ticks = 300;
    std::string bench_json;
    CLI::App* bench_cmd = app.add_subcommand("bench", "timing sweep over team sizes");
    bench_cmd->add_option("--sizes", bench_sizes, "team sizes (default 5 10 20 40 70)");
    bench_cmd->add_option("--ticks", bench_ticks, "ticks per run");
    bench_cmd->add_option("--json", bench_json, "write results as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return cmd_run(sargs, oargs, out_path, metrics_path, format, save_path);
        }
        if (audit_cmd->parsed()) return cmd_audit(trace_path);
        if (scenarios_cmd->parsed()) return cmd_scenarios();
        if (bench_cmd->parsed()) return cmd_bench(bench_sizes, bench_ticks, bench_json);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
