#pragma once

// Run orchestration: the step loop with diagnostics recording, cadence
// emission, snapshot/checkpoint persistence, restart, and the end-of-run
// report file.  Exit codes: 0 success, 2 I/O failure, 3 blow-up abort.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "axmhd/config.hpp"
#include "axmhd/diagnostics.hpp"
#include "axmhd/evolve.hpp"
#include "axmhd/ndjson.hpp"
#include "axmhd/presets.hpp"
#include "axmhd/snapshot.hpp"

namespace axmhd {

struct StepEvent {
    const State& state;
    const FlowField& flow;
    const DiagnosticRecord& rec;
    const DiagnosticsEngine& engine;
    double run_pi_min, run_pi_max;
};

using StepSink = std::function<void(const StepEvent&)>;

struct SimResult {
    std::vector<DiagnosticRecord> history;
    State final_state;
    FlowField final_flow;
    DiagnosticsEngine engine;
    double run_pi_min = 0, run_pi_max = 0;
    bool blew_up = false;
    std::string blowup_message;
};

namespace detail {

// Shared stepping loop.  The first record (the anchor) is always produced:
// on a fresh run it is the t = 0 record; on a resume it re-records the
// restored state, which advances the accumulators by a zero-length interval
// and reprimes the trapezoid integrands deterministically.
inline SimResult simulate_core(const RunConfig& cfg, State s, DiagnosticsEngine eng,
                               double pi_min0, double pi_max0, bool emit_anchor,
                               const StepSink& sink) {
    StepParams p = step_params(cfg);
    SimResult out;
    out.run_pi_min = pi_min0;
    out.run_pi_max = pi_max0;

    FlowField flow = biot_savart(omega_theta(s));
    DiagnosticRecord rec = eng.record(s, flow, 0.0);
    out.history.push_back(rec);
    out.run_pi_min = std::min(out.run_pi_min, rec.Pi_min);
    out.run_pi_max = std::max(out.run_pi_max, rec.Pi_max);
    if (emit_anchor && sink)
        sink(StepEvent{s, flow, rec, eng, out.run_pi_min, out.run_pi_max});

    const double t_end = cfg.t_end;
    const double t_eps = 1e-12 * std::max(1.0, std::abs(t_end));
    while (s.t < t_end - t_eps) {
        double dt = std::min(cfl_dt_from_flow(flow, p), t_end - s.t);
        try {
            s = step_with_flow(s, flow, dt, p);
        } catch (const BlowupError& e) {
            out.blew_up = true;
            out.blowup_message = e.what();
            break;
        }
        flow = biot_savart(omega_theta(s));
        rec = eng.record(s, flow, dt);
        out.history.push_back(rec);
        out.run_pi_min = std::min(out.run_pi_min, rec.Pi_min);
        out.run_pi_max = std::max(out.run_pi_max, rec.Pi_max);
        if (sink) sink(StepEvent{s, flow, rec, eng, out.run_pi_min, out.run_pi_max});
    }

    out.final_state = std::move(s);
    out.final_flow = std::move(flow);
    out.engine = eng;
    return out;
}

}  // namespace detail

// In-memory run from t = 0 (no artifacts); the sink observes every step.
inline SimResult run_simulation(const RunConfig& cfg, const StepSink& sink = nullptr) {
    auto [g, s] = build_initial(cfg);
    DiagnosticsEngine eng;
    eng.box_n = cfg.box_n;
    return detail::simulate_core(cfg, s, eng,
                                 std::numeric_limits<double>::infinity(),
                                 -std::numeric_limits<double>::infinity(),
                                 /*emit_anchor=*/true, sink);
}

namespace detail {

inline Snapshot make_checkpoint(const RunConfig& cfg, const StepEvent& ev) {
    Snapshot snap;
    snap.nr = std::uint32_t(ev.state.grid.nr);
    snap.nz = std::uint32_t(ev.state.grid.nz);
    snap.r_max = ev.state.grid.r_max;
    snap.z_len = ev.state.grid.z_len;
    snap.t = ev.state.t;
    snap.fields.push_back(pack_field("pi", ev.state.pi));
    snap.fields.push_back(pack_field("omega", ev.state.omega));
    snap.config_echo = cfg.echo;
    snap.meta = {
        {"step_index", double(ev.state.step_index)},
        {"guard_scale", ev.state.guard_scale},
        {"primed", ev.engine.primed ? 1.0 : 0.0},
        {"int_grad_u2", ev.engine.int_grad_u2},
        {"int_grad_Omega2", ev.engine.int_grad_Omega2},
        {"int_grad_u_Linf", ev.engine.int_grad_u_Linf},
        {"int_ur_over_r_Linf", ev.engine.int_ur_over_r_Linf},
        {"run_pi_min", ev.run_pi_min},
        {"run_pi_max", ev.run_pi_max},
    };
    return snap;
}

inline std::string snapshot_name(std::uint64_t step) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "snapshot_%06llu.bin",
                  static_cast<unsigned long long>(step));
    return buf;
}

inline void write_reports(std::ostream& out, const RunConfig& cfg, const SimResult& sim) {
    const auto& h = sim.history;
    if (h.empty()) return;

    InequalityReport pmax;
    pmax.name = "pi_max_principle";
    pmax.lhs = sim.run_pi_max;
    pmax.rhs = h.front().Pi_max;
    pmax.slack = pmax.rhs - pmax.lhs;
    pmax.satisfied = pmax.slack >= 0.0;
    out << to_json_line(pmax) << '\n';

    InequalityReport pmin;
    pmin.name = "pi_min_principle";
    pmin.lhs = h.front().Pi_min;
    pmin.rhs = sim.run_pi_min;
    pmin.slack = pmin.rhs - pmin.lhs;
    pmin.satisfied = pmin.slack >= 0.0;
    out << to_json_line(pmin) << '\n';

    for (auto [name, member] : {std::pair{"Pi_L2_drift", &DiagnosticRecord::Pi_L2},
                                std::pair{"Pi_L4_drift", &DiagnosticRecord::Pi_L4},
                                std::pair{"Pi_L6_drift", &DiagnosticRecord::Pi_L6}}) {
        RatioReport drift;
        drift.name = name;
        double base = h.front().*member;
        if (base == 0.0) {
            drift.omitted = true;
        } else {
            for (const auto& r : h)
                drift.value = std::max(drift.value, std::abs(r.*member - base) / base);
        }
        out << to_json_line(drift) << '\n';
    }

    if (h.size() >= 2) {
        out << to_json_line(energy_balance(h, cfg.energy_rel)) << '\n';
        RatioReport closure;
        closure.name = "energy_closure_residual";
        closure.value = energy_closure_residual(h, cfg.nu);
        out << to_json_line(closure) << '\n';

        out << to_json_line(omega_inequality(h, cfg.omega_interval_rel)) << '\n';
        RatioReport worst;
        worst.name = "omega_worst_interval";
        worst.value = omega_inequality_worst_interval(h);
        out << to_json_line(worst) << '\n';

        out << to_json_line(besov_lip_bound(h)) << '\n';
    }

    CzReport cz = cz_check(sim.final_flow, omega_theta(sim.final_state), cfg.cz_rel);
    if (!cz.skipped) out << to_json_line(cz.l2) << '\n';
    out << to_json_line(cz.r4) << '\n';
    out << to_json_line(cz.r6) << '\n';

    auto ratios = biot_savart_ratios(sim.final_state.omega, sim.final_flow);
    out << to_json_line(ratios[0]) << '\n';
    out << to_json_line(ratios[1]) << '\n';

    int positive = 0;
    for (const auto& r : h)
        if (r.t > 0.0) ++positive;
    if (positive >= 3) {
        for (const auto& rep : growth_envelopes(h)) out << to_json_line(rep) << '\n';
        for (const auto& rep : higher_norm_monitors(h)) out << to_json_line(rep) << '\n';
    }

    if (cfg.box_n > 0)
        out << to_json_line(magnetic_identity_check(b_theta(sim.final_state), cfg.box_n))
            << '\n';
}

inline std::string resolve_output_dir(const std::string& configured) {
    const char* env = std::getenv("AXMHD_OUTPUT_DIR");
    return (env && *env) ? std::string(env) : configured;
}

}  // namespace detail

struct RunOutcome {
    int exit_code = 0;
    std::string message;
    double final_t = 0;
    std::uint64_t steps = 0;
    std::string output_dir;
};

namespace detail {

// Artifact-writing wrapper around a prepared simulation start.
inline RunOutcome orchestrate(const RunConfig& cfg, const std::string& out_dir, State s,
                              DiagnosticsEngine eng, double pi_min0, double pi_max0,
                              bool emit_anchor) {
    namespace fs = std::filesystem;
    RunOutcome outcome;
    outcome.output_dir = out_dir;
    try {
        fs::create_directories(out_dir);
        std::ofstream diag(out_dir + "/diagnostics.ndjson",
                           std::ios::binary | std::ios::trunc);
        if (!diag) throw IoError("run: cannot open diagnostics file in " + out_dir);

        std::uint64_t last_emitted = std::uint64_t(-1);
        StepSink sink = [&](const StepEvent& ev) {
            std::uint64_t step = ev.state.step_index;
            if (step % std::uint64_t(cfg.diag_cadence) == 0) {
                diag << to_json_line(ev.rec) << '\n';
                last_emitted = step;
            }
            if (cfg.snapshot_cadence > 0 && step > 0 &&
                step % std::uint64_t(cfg.snapshot_cadence) == 0)
                write_snapshot(out_dir + "/" + snapshot_name(step),
                               make_checkpoint(cfg, ev));
        };

        SimResult sim = simulate_core(cfg, std::move(s), std::move(eng), pi_min0,
                                      pi_max0, emit_anchor, sink);

        // the final record always lands in the file, cadence-aligned or not
        if (!sim.history.empty() &&
            sim.final_state.step_index != last_emitted)
            diag << to_json_line(sim.history.back()) << '\n';
        diag.flush();
        if (!diag) throw IoError("run: diagnostics write failed");

        StepEvent last{sim.final_state, sim.final_flow, sim.history.back(), sim.engine,
                       sim.run_pi_min, sim.run_pi_max};
        write_snapshot(out_dir + "/checkpoint.bin", make_checkpoint(cfg, last));

        std::ofstream reports(out_dir + "/inequality_reports.ndjson",
                              std::ios::binary | std::ios::trunc);
        if (!reports) throw IoError("run: cannot open report file in " + out_dir);
        write_reports(reports, cfg, sim);
        reports.flush();
        if (!reports) throw IoError("run: report write failed");

        outcome.final_t = sim.final_state.t;
        outcome.steps = sim.final_state.step_index;
        if (sim.blew_up) {
            outcome.exit_code = 3;
            outcome.message = sim.blowup_message;
        } else {
            outcome.message = "completed";
        }
    } catch (const IoError& e) {
        outcome.exit_code = 2;
        outcome.message = e.what();
    }
    return outcome;
}

}  // namespace detail

inline RunOutcome run_command(const RunConfig& cfg) {
    auto [g, s] = build_initial(cfg);
    DiagnosticsEngine eng;
    eng.box_n = cfg.box_n;
    return detail::orchestrate(cfg, detail::resolve_output_dir(cfg.output_dir),
                               std::move(s), std::move(eng),
                               std::numeric_limits<double>::infinity(),
                               -std::numeric_limits<double>::infinity(),
                               /*emit_anchor=*/true);
}

// Resume from a checkpoint and run to the (later) t_end.  Emits records
// strictly after the checkpoint step, so a run interrupted at a snapshot
// plus its replay concatenate into the uninterrupted run's diagnostics.
inline RunOutcome replay_command(const std::string& checkpoint_path, double t_end,
                                 const std::string& output_dir_override = "") {
    Snapshot snap = read_snapshot(checkpoint_path);
    RunConfig cfg = parse_config(snap.config_echo);
    if (!(t_end > snap.t))
        throw ConfigError("replay: t_end must exceed the checkpoint time " +
                          std::to_string(snap.t));
    cfg.t_end = t_end;

    CylGrid g = make_grid(int(snap.nr), int(snap.nz), snap.r_max, snap.z_len);
    State s;
    s.grid = g;
    s.t = snap.t;
    s.step_index = std::uint64_t(snap.meta_value("step_index"));
    s.pi = unpack_field(snap, "pi", g);
    s.omega = unpack_field(snap, "omega", g);
    s.guard_scale = snap.meta_value("guard_scale");

    DiagnosticsEngine eng;
    eng.box_n = cfg.box_n;
    eng.primed = snap.meta_value("primed") != 0.0;
    eng.prev_t = snap.t;
    eng.int_grad_u2 = snap.meta_value("int_grad_u2");
    eng.int_grad_Omega2 = snap.meta_value("int_grad_Omega2");
    eng.int_grad_u_Linf = snap.meta_value("int_grad_u_Linf");
    eng.int_ur_over_r_Linf = snap.meta_value("int_ur_over_r_Linf");

    std::string dir = !output_dir_override.empty()
                          ? output_dir_override
                          : detail::resolve_output_dir(cfg.output_dir + "_replay");
    return detail::orchestrate(cfg, dir, std::move(s), std::move(eng),
                               snap.meta_value("run_pi_min"),
                               snap.meta_value("run_pi_max"),
                               /*emit_anchor=*/false);
}

}  // namespace axmhd
