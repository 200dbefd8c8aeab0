#pragma once

// Named initial conditions.  The reference pair at unit amplitude and width:
//   Pi_0    = exp(-(r^2+z^2))          (poloidal-current density B_theta / r)
//   Omega_0 = (1 - r^2) exp(-(r^2+z^2))  (a vortex ring with zero net swirl flux)
// Width rescales the Gaussian argument; amplitudes scale each field.

#include <utility>

#include "axmhd/config.hpp"
#include "axmhd/evolve.hpp"
#include "axmhd/expression.hpp"
#include "axmhd/grid.hpp"

namespace axmhd {

inline State initial_state(const RunConfig& cfg, const CylGrid& g) {
    const double w2 = cfg.width * cfg.width;
    auto bump = [w2](double r, double z) { return std::exp(-(r * r + z * z) / w2); };
    auto ring = [&, w2](double r, double z) {
        return (1.0 - r * r / w2) * bump(r, z);
    };

    ScalarField pi(g, Parity::Even), omega(g, Parity::Even);
    if (cfg.preset == "zero") {
        // fields already zero
    } else if (cfg.preset == "ring+gauss") {
        pi = sample(g, Parity::Even,
                    [&](double r, double z) { return cfg.pi_amp * bump(r, z); });
        omega = sample(g, Parity::Even,
                       [&](double r, double z) { return cfg.omega_amp * ring(r, z); });
    } else if (cfg.preset == "gauss-pi") {
        pi = sample(g, Parity::Even,
                    [&](double r, double z) { return cfg.pi_amp * bump(r, z); });
    } else if (cfg.preset == "ns-ring") {
        omega = sample(g, Parity::Even,
                       [&](double r, double z) { return cfg.omega_amp * ring(r, z); });
    } else if (cfg.preset == "expr") {
        if (!cfg.pi_expr.empty()) {
            Expression e(cfg.pi_expr);
            pi = sample(g, Parity::Even, [&](double r, double z) { return e(r, z); });
        }
        if (!cfg.omega_expr.empty()) {
            Expression e(cfg.omega_expr);
            omega = sample(g, Parity::Even, [&](double r, double z) { return e(r, z); });
        }
    } else {
        throw ConfigError("initial_state: unknown preset '" + cfg.preset + "'");
    }
    return make_state(g, pi, omega);
}

inline std::pair<CylGrid, State> build_initial(const RunConfig& cfg) {
    CylGrid g = make_grid(cfg.nr, cfg.nz, cfg.r_max, cfg.z_len);
    return {g, initial_state(cfg, g)};
}

inline StepParams step_params(const RunConfig& cfg) {
    StepParams p;
    p.nu = cfg.nu;
    p.cfl = cfg.cfl;
    p.dt_max = cfg.dt_max;
    p.interp = cfg.interp_mode();
    return p;
}

}  // namespace axmhd
