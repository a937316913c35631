#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "vrvo/sim.hpp"

namespace vrvo {

// Scenario documents are strict JSON: a version field is required and
// unknown keys are rejected, so a typo cannot silently fall back to a
// safety-relevant default.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

// Trace: newline-delimited JSON. First line is a meta record embedding the
// scenario; every following line is one TraceRecord.
void write_trace_jsonl(std::ostream& out, const Scenario& scenario,
                       std::span<const TraceRecord> trace);
void write_trace_jsonl(const std::string& path, const Scenario& scenario,
                       std::span<const TraceRecord> trace);
std::pair<Scenario, std::vector<TraceRecord>> read_trace_jsonl(const std::string& path);

// CSV flavor for plotting: tick,id,px,py,vx,vy,ux,uy,mode,flags.
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);
void write_trace_csv(const std::string& path, std::span<const TraceRecord> trace);

std::string metrics_to_json(const RunMetrics& metrics);
void write_metrics_json(const RunMetrics& metrics, const std::string& path);

// Post-hoc verification of a trace: recomputes every per-tick buffered
// Voronoi cell and checks that each normally-operating agent's applied
// motion stayed inside its own cell, that held agents never moved, and
// re-derives the separation statistics.
struct AuditReport {
    int containment_violations = 0;
    int hold_move_violations = 0;
    int collision_events = 0;
    double min_separation = 0.0;
    int ticks = 0;
    int first_violation_tick = -1;

    bool ok() const {
        return containment_violations == 0 && hold_move_violations == 0 && collision_events == 0;
    }
};

AuditReport audit_trace(const Scenario& scenario, std::span<const TraceRecord> trace);

}  // namespace vrvo
