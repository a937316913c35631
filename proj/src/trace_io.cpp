#include "vrvo/trace_io.hpp"

#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vrvo {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw std::runtime_error(std::string("unknown key '") + it.key() + "' in " + where);
        }
    }
}

json vec_to_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::runtime_error("expected [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

Mode mode_from_string(const std::string& s) {
    if (s == "DEFAULT") return Mode::Default;
    if (s == "HOLD") return Mode::Hold;
    if (s == "DEADLOCK") return Mode::Deadlock;
    throw std::runtime_error("unknown mode '" + s + "'");
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
    json j;
    j["version"] = kFormatVersion;
    j["name"] = sc.name;
    j["model"] = to_string(sc.model);
    j["method"] = to_string(sc.method);
    j["deadlock_enabled"] = sc.deadlock_enabled;
    j["max_ticks"] = sc.max_ticks;
    j["orca_tau"] = sc.orca_tau;
    j["limits"] = {{"v_max", sc.limits.v_max},
                   {"a_max", sc.limits.a_max},
                   {"t_h", sc.limits.t_h},
                   {"dt", sc.limits.dt}};
    const VrvoConfig& c = sc.config;
    j["config"] = {{"sigma", c.sigma},
                   {"apex_mode", c.apex_mode == ApexMode::Rvo ? "rvo" : "vo_center"},
                   {"tau", std::isfinite(c.tau) ? c.tau : 0.0},
                   {"si_slow_radius", c.si_slow_radius},
                   {"eps_p", c.eps_p},
                   {"eps_v", c.eps_v},
                   {"sensing_radius", c.sensing_radius},
                   {"deadlock_patience", c.deadlock_patience},
                   {"workspace_half_extent", c.workspace_half_extent},
                   {"obstacle_decel_uses_agent", c.obstacle_decel_uses_agent},
                   {"max_th_halvings", c.max_th_halvings}};
    j["agents"] = json::array();
    for (const AgentSpec& a : sc.agents) {
        j["agents"].push_back(
            {{"p", vec_to_json(a.p)}, {"g", vec_to_json(a.g)}, {"radius", a.radius}});
    }
    j["obstacles"] = json::array();
    for (const ObstacleState& ob : sc.obstacles) {
        j["obstacles"].push_back({{"p", vec_to_json(ob.p)},
                                  {"radius", ob.radius},
                                  {"v_max", ob.v_max},
                                  {"a_max", ob.a_max}});
    }
    return j.dump();
}

Scenario scenario_from_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.is_object()) throw std::runtime_error("scenario must be a JSON object");
    reject_unknown_keys(j,
                        {"version", "name", "model", "method", "deadlock_enabled", "max_ticks",
                         "orca_tau", "limits", "config", "agents", "obstacles"},
                        "scenario");
    if (!j.contains("version")) throw std::runtime_error("scenario is missing 'version'");
    if (j["version"].get<int>() != kFormatVersion) {
        throw std::runtime_error("unsupported scenario version");
    }

    Scenario sc;
    if (j.contains("name")) sc.name = j["name"].get<std::string>();
    if (j.contains("model")) {
        std::string m = j["model"].get<std::string>();
        if (m == "si") {
            sc.model = Model::SingleIntegrator;
        } else if (m == "di") {
            sc.model = Model::DoubleIntegrator;
        } else {
            throw std::runtime_error("model must be 'si' or 'di'");
        }
    }
    if (j.contains("method")) {
        std::string m = j["method"].get<std::string>();
        if (m == "vrvo") {
            sc.method = Method::Vrvo;
        } else if (m == "orca") {
            sc.method = Method::Orca;
        } else {
            throw std::runtime_error("method must be 'vrvo' or 'orca'");
        }
    }
    if (j.contains("deadlock_enabled")) sc.deadlock_enabled = j["deadlock_enabled"].get<bool>();
    if (j.contains("max_ticks")) sc.max_ticks = j["max_ticks"].get<int>();
    if (j.contains("orca_tau")) sc.orca_tau = j["orca_tau"].get<double>();

    if (j.contains("limits")) {
        const json& l = j["limits"];
        reject_unknown_keys(l, {"v_max", "a_max", "t_h", "dt"}, "limits");
        if (l.contains("v_max")) sc.limits.v_max = l["v_max"].get<double>();
        if (l.contains("a_max")) sc.limits.a_max = l["a_max"].get<double>();
        if (l.contains("t_h")) sc.limits.t_h = l["t_h"].get<double>();
        if (l.contains("dt")) sc.limits.dt = l["dt"].get<double>();
    }
    if (j.contains("config")) {
        const json& c = j["config"];
        reject_unknown_keys(c,
                            {"sigma", "apex_mode", "tau", "si_slow_radius", "eps_p", "eps_v",
                             "sensing_radius", "deadlock_patience", "workspace_half_extent",
                             "obstacle_decel_uses_agent", "max_th_halvings"},
                            "config");
        VrvoConfig& cfg = sc.config;
        if (c.contains("sigma")) cfg.sigma = c["sigma"].get<double>();
        if (c.contains("apex_mode")) {
            std::string m = c["apex_mode"].get<std::string>();
            if (m == "rvo") {
                cfg.apex_mode = ApexMode::Rvo;
            } else if (m == "vo_center") {
                cfg.apex_mode = ApexMode::VoCenter;
            } else {
                throw std::runtime_error("apex_mode must be 'rvo' or 'vo_center'");
            }
        }
        if (c.contains("tau")) {
            double tau = c["tau"].get<double>();
            cfg.tau = tau > 0.0 ? tau : std::numeric_limits<double>::infinity();
        }
        if (c.contains("si_slow_radius")) cfg.si_slow_radius = c["si_slow_radius"].get<double>();
        if (c.contains("eps_p")) cfg.eps_p = c["eps_p"].get<double>();
        if (c.contains("eps_v")) cfg.eps_v = c["eps_v"].get<double>();
        if (c.contains("sensing_radius")) cfg.sensing_radius = c["sensing_radius"].get<double>();
        if (c.contains("deadlock_patience"))
            cfg.deadlock_patience = c["deadlock_patience"].get<int>();
        if (c.contains("workspace_half_extent"))
            cfg.workspace_half_extent = c["workspace_half_extent"].get<double>();
        if (c.contains("obstacle_decel_uses_agent"))
            cfg.obstacle_decel_uses_agent = c["obstacle_decel_uses_agent"].get<bool>();
        if (c.contains("max_th_halvings")) cfg.max_th_halvings = c["max_th_halvings"].get<int>();
    }
    if (j.contains("agents")) {
        for (const json& a : j["agents"]) {
            reject_unknown_keys(a, {"p", "g", "radius"}, "agent");
            AgentSpec spec;
            spec.p = vec_from_json(a.at("p"));
            spec.g = vec_from_json(a.at("g"));
            if (a.contains("radius")) spec.radius = a["radius"].get<double>();
            sc.agents.push_back(spec);
        }
    }
    if (j.contains("obstacles")) {
        for (const json& o : j["obstacles"]) {
            reject_unknown_keys(o, {"p", "radius", "v_max", "a_max"}, "obstacle");
            ObstacleState ob;
            ob.p = vec_from_json(o.at("p"));
            if (o.contains("radius")) ob.radius = o["radius"].get<double>();
            if (o.contains("v_max")) ob.v_max = o["v_max"].get<double>();
            if (o.contains("a_max")) ob.a_max = o["a_max"].get<double>();
            sc.obstacles.push_back(ob);
        }
    }
    std::string why;
    if (!sc.valid(&why)) throw std::runtime_error("invalid scenario: " + why);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << scenario_to_json(scenario) << "\n";
}

void write_trace_jsonl(std::ostream& out, const Scenario& scenario,
                       std::span<const TraceRecord> trace) {
    json meta;
    meta["type"] = "meta";
    meta["version"] = kFormatVersion;
    meta["scenario"] = json::parse(scenario_to_json(scenario));
    out << meta.dump() << "\n";
    for (const TraceRecord& r : trace) {
        json j;
        j["type"] = "rec";
        j["t"] = r.tick;
        j["id"] = r.id;
        j["p"] = vec_to_json(r.p);
        j["v"] = vec_to_json(r.v);
        j["u"] = vec_to_json(r.u);
        j["mode"] = to_string(r.mode);
        j["fb"] = r.fallback;
        j["inf"] = r.infeasible;
        j["arr"] = r.arrived;
        out << j.dump() << "\n";
    }
}

void write_trace_jsonl(const std::string& path, const Scenario& scenario,
                       std::span<const TraceRecord> trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    write_trace_jsonl(out, scenario, trace);
}

std::pair<Scenario, std::vector<TraceRecord>> read_trace_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace file");
    json meta = json::parse(line);
    if (meta.value("type", "") != "meta" || !meta.contains("scenario")) {
        throw std::runtime_error("trace file does not start with a meta record");
    }
    Scenario sc = scenario_from_json(meta["scenario"].dump());
    std::vector<TraceRecord> trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (j.value("type", "") != "rec") continue;
        TraceRecord r;
        r.tick = j.at("t").get<int>();
        r.id = j.at("id").get<int>();
        r.p = vec_from_json(j.at("p"));
        r.v = vec_from_json(j.at("v"));
        r.u = vec_from_json(j.at("u"));
        r.mode = mode_from_string(j.at("mode").get<std::string>());
        r.fallback = j.value("fb", false);
        r.infeasible = j.value("inf", false);
        r.arrived = j.value("arr", false);
        trace.push_back(r);
    }
    return {std::move(sc), std::move(trace)};
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
    out << "tick,id,px,py,vx,vy,ux,uy,mode,flags\n";
    char buf[256];
    for (const TraceRecord& r : trace) {
        std::string flags;
        if (r.fallback) flags += 'f';
        if (r.infeasible) flags += 'i';
        if (r.arrived) flags += 'a';
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%s\n",
                      r.tick, r.id, r.p.x, r.p.y, r.v.x, r.v.y, r.u.x, r.u.y, to_string(r.mode),
                      flags.c_str());
        out << buf;
    }
}

void write_trace_csv(const std::string& path, std::span<const TraceRecord> trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    write_trace_csv(out, trace);
}

std::string metrics_to_json(const RunMetrics& m) {
    json j;
    j["collision_count"] = m.collision_count;
    j["min_separation"] = m.min_separation;
    j["makespan_ticks"] = m.makespan_ticks;
    j["arrived_count"] = m.arrived_count;
    j["all_arrived"] = m.all_arrived;
    j["ticks_run"] = m.ticks_run;
    j["mean_step_ms"] = m.mean_step_ms;
    j["max_step_ms"] = m.max_step_ms;
    j["agent_ticks"] = m.agent_ticks;
    j["infeasible_ticks"] = m.infeasible_ticks;
    j["deadlock"] = {{"detected", m.deadlock.detected},
                     {"resolved", m.deadlock.resolved},
                     {"aborted", m.deadlock.aborted}};
    return j.dump();
}

void write_metrics_json(const RunMetrics& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metrics file: " + path);
    out << metrics_to_json(m) << "\n";
}

AuditReport audit_trace(const Scenario& scenario, std::span<const TraceRecord> trace) {
    AuditReport report;
    report.min_separation = std::numeric_limits<double>::infinity();

    // Bucket records per tick, id-indexed.
    std::map<int, std::vector<TraceRecord>> ticks;
    for (const TraceRecord& r : trace) ticks[r.tick].push_back(r);
    report.ticks = static_cast<int>(ticks.size());
    if (ticks.empty()) return report;

    ConvexCell workspace = scenario.config.workspace();
    auto note_violation = [&](int tick, int& counter) {
        ++counter;
        if (report.first_violation_tick < 0) report.first_violation_tick = tick;
    };

    for (auto it = ticks.begin(); it != ticks.end(); ++it) {
        const std::vector<TraceRecord>& now = it->second;
        for (std::size_t i = 0; i < now.size(); ++i) {
            for (std::size_t j = i + 1; j < now.size(); ++j) {
                double sep = distance(now[i].p, now[j].p);
                report.min_separation = std::min(report.min_separation, sep);
                double rsum = scenario.agents[static_cast<std::size_t>(now[i].id)].radius +
                              scenario.agents[static_cast<std::size_t>(now[j].id)].radius;
                if (sep < rsum - 1e-6) note_violation(it->first, report.collision_events);
            }
        }

        auto next = std::next(it);
        if (next == ticks.end()) break;
        const std::vector<TraceRecord>& after = next->second;

        std::vector<AgentState> states;
        states.reserve(now.size());
        for (const TraceRecord& r : now) {
            states.push_back({r.id, r.p, r.v, scenario.agents[static_cast<std::size_t>(r.id)].g,
                              scenario.agents[static_cast<std::size_t>(r.id)].radius, r.mode});
        }

        for (const TraceRecord& r : now) {
            const TraceRecord* moved = nullptr;
            for (const TraceRecord& q : after) {
                if (q.id == r.id) {
                    moved = &q;
                    break;
                }
            }
            if (!moved) continue;

            if (r.mode == Mode::Hold) {
                if (distance(moved->p, r.p) > 1e-12) {
                    note_violation(it->first, report.hold_move_violations);
                }
                continue;
            }
            if (r.mode != Mode::Default) continue;  // switch maneuvers cross cells by design

            std::vector<AgentState> sensed;
            for (const AgentState& s : states) {
                if (s.id == r.id) continue;
                if (distance(s.p, r.p) <= scenario.config.sensing_radius) sensed.push_back(s);
            }
            AgentState self{r.id, r.p, r.v, scenario.agents[static_cast<std::size_t>(r.id)].g,
                            scenario.agents[static_cast<std::size_t>(r.id)].radius, r.mode};
            BvcResult bvc = compute_bvc(self, sensed, workspace);
            if (bvc.center_outside) continue;  // controller braked; nothing to check against
            if (!bvc.cell.contains(moved->p, 1e-7)) {
                note_violation(it->first, report.containment_violations);
            }
        }
    }
    return report;
}

}  // namespace vrvo
