#pragma once

// Time stepping for the reduced system
//   Pi_t    + u . grad Pi    = 0
//   Omega_t + u . grad Omega = (Delta + (2/r) d_r) Omega - d_z Pi^2
// by Lie splitting: semi-Lagrangian transport, explicit source, implicit
// diffusion.  Transport uses midpoint characteristic tracing with the
// start-of-step flow and a monotone (Steffen-limited) cubic interpolant,
// so advection can never create new extrema: for even fields the result
// stays inside [min f, max f] exactly, for odd fields inside
// [-max |f|, max |f|] (the axis fold negates mirrored stencil values).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>

#include "axmhd/elliptic.hpp"
#include "axmhd/interp.hpp"
#include "axmhd/grid.hpp"

namespace axmhd {

struct StepError : Error { using Error::Error; };
struct BlowupError : Error { using Error::Error; };

struct StepParams {
    double nu = 1.0;
    double cfl = 0.5;
    double dt_max = 0.02;
    Interp interp = Interp::MonotoneCubic;
    double guard_factor = 1e6;  // blow-up guard threshold multiplier
};

struct State {
    CylGrid grid;
    double t = 0.0;
    std::uint64_t step_index = 0;
    ScalarField pi;          // Even
    ScalarField omega;       // Even
    double guard_scale = 0;  // frozen at construction; 0 disables the guard
};

inline State make_state(const CylGrid& g, const ScalarField& pi, const ScalarField& omega,
                        double t = 0.0) {
    require_parity(pi, Parity::Even, "make_state(pi)");
    require_parity(omega, Parity::Even, "make_state(omega)");
    if (!(pi.grid == g) || !(omega.grid == g))
        throw SizingError("make_state: field grids do not match");
    State s{g, t, 0, pi, omega, 0.0};
    s.guard_scale = std::max(linf_norm(omega), linf_norm(pi));
    return s;
}

inline ScalarField b_theta(const State& s) { return multiply_by_r(s.pi); }
inline ScalarField omega_theta(const State& s) { return multiply_by_r(s.omega); }

// --- transport --------------------------------------------------------------

// Semi-Lagrangian advection over one step of the frozen flow: midpoint
// characteristic tracing (bilinear velocity samples), then monotone
// interpolation of the field at the foot point.
inline ScalarField advect_sl(const ScalarField& f, const FlowField& flow, double dt,
                             Interp mode = Interp::MonotoneCubic) {
    require_same_grid(f, flow.uz, "advect_sl");
    const CylGrid& g = f.grid;
    ScalarField out(g, f.parity);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            double r = g.r(i), z = g.z(j);
            double rm = r - 0.5 * dt * flow.ur(i, j);
            double zm = z - 0.5 * dt * flow.uz(i, j);
            double umr = interpolate(flow.ur, rm, zm, Interp::Linear);
            double umz = interpolate(flow.uz, rm, zm, Interp::Linear);
            double rf = r - dt * umr;
            double zf = z - dt * umz;
            if (!std::isfinite(rf) || !std::isfinite(zf))
                throw StepError("advect_sl: non-finite foot point at node (i=" +
                                std::to_string(i) + ", j=" + std::to_string(j) + ")");
            out(i, j) = interpolate(f, rf, zf, mode);
        }
    return out;
}

// Magnetic source of the reduced vorticity equation: -d_z(Pi^2).
inline ScalarField source_omega(const ScalarField& pi) {
    require_parity(pi, Parity::Even, "source_omega");
    return -1.0 * ddz(pointwise(pi, pi));
}

// --- step size --------------------------------------------------------------

inline double cfl_dt_from_flow(const FlowField& flow, const StepParams& p) {
    double umax = std::max({linf_norm(flow.ur), linf_norm(flow.uz), 1e-12});
    const CylGrid& g = flow.uz.grid;
    return std::min(p.dt_max, p.cfl * std::min(g.dr, g.dz) / umax);
}

inline double cfl_dt(const State& s, const StepParams& p) {
    return cfl_dt_from_flow(biot_savart(omega_theta(s)), p);
}

// --- stepping ---------------------------------------------------------------

using Forcing = std::function<double(double, double, double)>;  // (r, z, t)

namespace detail {

inline void check_guard(const State& s, const StepParams& p) {
    if (s.guard_scale <= 0.0) return;
    if (linf_norm(s.omega) > p.guard_factor * s.guard_scale)
        throw BlowupError("step: |Omega|_inf exceeded " + std::to_string(p.guard_factor) +
                          " x initial scale at t=" + std::to_string(s.t));
}

inline State step_core(const State& s, const FlowField& flow, double dt, const StepParams& p,
                       const Forcing& f_pi, const Forcing& f_om) {
    State n = s;
    n.pi = advect_sl(s.pi, flow, dt, p.interp);
    if (f_pi) {
        const CylGrid& g = s.grid;
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i)
                n.pi(i, j) += dt * f_pi(g.r(i), g.z(j), s.t);
    }
    ScalarField om = advect_sl(s.omega, flow, dt, p.interp);
    ScalarField src = source_omega(n.pi);
    for (std::size_t k = 0; k < om.v.size(); ++k) om.v[k] += dt * src.v[k];
    if (f_om) {
        const CylGrid& g = s.grid;
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i)
                om(i, j) += dt * f_om(g.r(i), g.z(j), s.t);
    }
    n.omega = solve_diffusion(om, dt, p.nu);
    n.t = s.t + dt;
    n.step_index = s.step_index + 1;
    check_guard(n, p);
    return n;
}

}  // namespace detail

// One split step with a precomputed start-of-step flow and step size
// (the runner reuses the flow it already needs for diagnostics).
inline State step_with_flow(const State& s, const FlowField& flow, double dt,
                            const StepParams& p) {
    return detail::step_core(s, flow, dt, p, nullptr, nullptr);
}

inline State step(const State& s, const StepParams& p) {
    FlowField flow = biot_savart(omega_theta(s));
    double dt = cfl_dt_from_flow(flow, p);
    return detail::step_core(s, flow, dt, p, nullptr, nullptr);
}

// Forced variant for manufactured-solution studies.  Forcings are sampled
// at the start-of-step time and applied after each substep's transport;
// an empty Forcing adds nothing and leaves the unforced path bit-intact.
// flow_override freezes the velocity (convergence cases); dt_override
// bypasses the CFL formula.
inline State step_forced(const State& s, const StepParams& p, const Forcing& f_pi,
                         const Forcing& f_om,
                         const std::optional<FlowField>& flow_override = {},
                         std::optional<double> dt_override = {}) {
    FlowField flow = flow_override ? *flow_override : biot_savart(omega_theta(s));
    double dt = dt_override ? *dt_override : cfl_dt_from_flow(flow, p);
    return detail::step_core(s, flow, dt, p, f_pi, f_om);
}

// --- primitive-variable cross-check path -------------------------------------

// One split step of the unreduced vorticity equation
//   w_t + u . grad w = (Delta - 1/r^2) w + (u^r / r) w - d_z(B_theta^2 / r)
// sharing the transport and solver kernels.  The caller supplies the flow
// (computed from w) and the current B_theta, and advances B_theta itself.
inline ScalarField evolve_omega_primitive(const ScalarField& w_theta,
                                          const ScalarField& btheta, const FlowField& flow,
                                          double dt, const StepParams& p) {
    require_parity(w_theta, Parity::Odd, "evolve_omega_primitive(w)");
    require_parity(btheta, Parity::Odd, "evolve_omega_primitive(btheta)");
    ScalarField w = advect_sl(w_theta, flow, dt, p.interp);
    ScalarField stretch = pointwise(flow.ur_over_r, w);                  // Odd
    ScalarField src = -1.0 * ddz(divide_by_r(pointwise(btheta, btheta)));  // Odd
    for (std::size_t k = 0; k < w.v.size(); ++k)
        w.v[k] += dt * (stretch.v[k] + src.v[k]);
    return solve_theta_diffusion(w, dt, p.nu);
}

}  // namespace axmhd
