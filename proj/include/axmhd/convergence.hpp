#pragma once

// Manufactured-solution refinement studies behind `converge`.  Three cases
// at nr in {32, 64, 128} with dt proportional to h:
//   diffusion: frozen zero flow, steady Omega held by a forcing; the
//              backward-Euler fixed point isolates the spatial operator,
//              so the observed order is the stencil's (about 2).
//   advection: frozen uniform axial flow transporting a Gaussian Pi; the
//              error is pure interpolation, order about 2 with the
//              monotone cubic.
//   full:      self-consistent flow with the decaying pair
//                Pi*    = e^{-t} g,   Omega* = 2 (5 - 2r^2 - 2z^2) e^{-t} g,
//                g = exp(-r^2 - z^2),
//              held by forcings; first-order splitting bounds the order
//              near 1.
// Forcing expressions were derived symbolically and are frozen here.

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "axmhd/evolve.hpp"
#include "axmhd/grid.hpp"

namespace axmhd {

struct ConvergenceRow {
    int nr = 0, nz = 0, steps = 0;
    double dt = 0;
    double err_pi = 0, err_omega = 0;
};

struct ConvergenceTable {
    std::string case_name;
    std::vector<ConvergenceRow> rows;
    bool pi_tracked = false, omega_tracked = false;
    double order_pi = 0, order_omega = 0;  // finest pair
    bool monotone = true;
    double threshold = 0;
    bool pass = false;
};

namespace detail {

inline double wrap_periodic(double z, double z_len) {
    double half = 0.5 * z_len;
    double w = std::fmod(z + half, z_len);
    if (w < 0) w += z_len;
    return w - half;
}

struct ManufacturedCase {
    std::string name;
    bool track_pi = false, track_omega = false;
    double t_end = 0;
    double dt_scale = 0;  // dt = dt_scale / nr
    double threshold = 0;

    std::function<double(double, double)> pi0, omega0;
    std::function<double(double, double, double)> pi_exact, omega_exact;  // (r,z,t)
    Forcing f_pi, f_om;
    bool frozen_flow = false;
    double frozen_uz = 0;
};

inline ManufacturedCase manufactured_case(const std::string& name, double nu) {
    auto g2 = [](double r, double z) { return std::exp(-r * r - z * z); };
    ManufacturedCase mc;
    mc.name = name;
    if (name == "diffusion") {
        mc.track_omega = true;
        mc.t_end = 0.2;
        mc.dt_scale = 0.64;
        mc.threshold = 1.7;
        mc.frozen_flow = true;
        mc.omega0 = [g2](double r, double z) { return (1.0 - r * r) * g2(r, z); };
        mc.omega_exact = [g2](double r, double z, double) {
            return (1.0 - r * r) * g2(r, z);
        };
        mc.f_om = [g2, nu](double r, double z, double) {
            return 2.0 * nu *
                   (2.0 * r * r * r * r + 2.0 * r * r * z * z - 11.0 * r * r -
                    2.0 * z * z + 9.0) *
                   g2(r, z);
        };
    } else if (name == "advection") {
        mc.track_pi = true;
        mc.t_end = 0.5;
        mc.dt_scale = 2.0;
        mc.threshold = 1.7;
        mc.frozen_flow = true;
        mc.frozen_uz = 1.0;
        mc.pi0 = g2;
        mc.pi_exact = [g2](double r, double z, double t) {
            return g2(r, detail::wrap_periodic(z - t, 8.0));
        };
    } else if (name == "full") {
        mc.track_pi = true;
        mc.track_omega = true;
        mc.t_end = 0.25;
        mc.dt_scale = 0.8;
        mc.threshold = 0.9;
        mc.pi0 = g2;
        mc.omega0 = [g2](double r, double z) {
            return 2.0 * (5.0 - 2.0 * r * r - 2.0 * z * z) * g2(r, z);
        };
        mc.pi_exact = [g2](double r, double z, double t) {
            return std::exp(-t) * g2(r, z);
        };
        mc.omega_exact = [g2](double r, double z, double t) {
            return 2.0 * (5.0 - 2.0 * r * r - 2.0 * z * z) * std::exp(-t) * g2(r, z);
        };
        mc.f_pi = [](double r, double z, double t) {
            double e1 = std::exp(-(r * r + z * z + t));
            return -4.0 * z * e1 * e1 - e1;
        };
        mc.f_om = [nu](double r, double z, double t) {
            double r2 = r * r, z2 = z * z;
            double e1 = std::exp(-(r2 + z2 + t));
            return 4.0 * z * (4.0 * r2 + 4.0 * z2 - 15.0) * e1 * e1 +
                   2.0 *
                       (8.0 * nu * r2 * r2 + 16.0 * nu * r2 * z2 - 56.0 * nu * r2 +
                        8.0 * nu * z2 * z2 - 56.0 * nu * z2 + 70.0 * nu + 2.0 * r2 +
                        2.0 * z2 - 5.0) *
                       e1;
        };
    } else {
        throw Error("converge: unknown case '" + name + "' (want diffusion|advection|full)");
    }
    return mc;
}

}  // namespace detail

inline ConvergenceTable converge_command(const std::string& case_name, double nu = 1.0) {
    detail::ManufacturedCase mc = detail::manufactured_case(case_name, nu);
    ConvergenceTable table;
    table.case_name = mc.name;
    table.pi_tracked = mc.track_pi;
    table.omega_tracked = mc.track_omega;
    table.threshold = mc.threshold;

    StepParams p;
    p.nu = nu;

    for (int nr : {32, 64, 128}) {
        CylGrid g = make_grid(nr, 2 * nr, 4.0, 8.0);
        ScalarField pi0 = mc.pi0 ? sample(g, Parity::Even, mc.pi0)
                                 : ScalarField(g, Parity::Even);
        ScalarField om0 = mc.omega0 ? sample(g, Parity::Even, mc.omega0)
                                    : ScalarField(g, Parity::Even);
        State s = make_state(g, pi0, om0);

        std::optional<FlowField> flow;
        if (mc.frozen_flow) {
            ScalarField ur(g, Parity::Odd), uz(g, Parity::Even);
            for (double& v : uz.v) v = mc.frozen_uz;
            flow = make_flow(ur, uz);
        }

        ConvergenceRow row;
        row.nr = nr;
        row.nz = 2 * nr;
        row.dt = mc.dt_scale / nr;
        row.steps = int(std::lround(mc.t_end / row.dt));
        for (int k = 0; k < row.steps; ++k)
            s = step_forced(s, p, mc.f_pi, mc.f_om, flow, row.dt);

        if (mc.track_pi) {
            ScalarField ref = sample(g, Parity::Even, [&](double r, double z) {
                return mc.pi_exact(r, z, s.t);
            });
            row.err_pi = lp_norm(s.pi - ref, 2) / lp_norm(ref, 2);
        }
        if (mc.track_omega) {
            ScalarField ref = sample(g, Parity::Even, [&](double r, double z) {
                return mc.omega_exact(r, z, s.t);
            });
            row.err_omega = lp_norm(s.omega - ref, 2) / lp_norm(ref, 2);
        }
        table.rows.push_back(row);
    }

    auto order_of = [&](double ConvergenceRow::*err) {
        const auto& r = table.rows;
        for (std::size_t i = 0; i + 1 < r.size(); ++i)
            if (r[i + 1].*err >= r[i].*err) table.monotone = false;
        return std::log2(r[r.size() - 2].*err / r.back().*err);
    };
    double min_order = HUGE_VAL;
    if (mc.track_pi) {
        table.order_pi = order_of(&ConvergenceRow::err_pi);
        min_order = std::min(min_order, table.order_pi);
    }
    if (mc.track_omega) {
        table.order_omega = order_of(&ConvergenceRow::err_omega);
        min_order = std::min(min_order, table.order_omega);
    }
    table.pass = min_order >= mc.threshold;
    return table;
}

inline void print_convergence(const ConvergenceTable& t, std::ostream& out) {
    out << "case " << t.case_name << " (dt ~ h)\n";
    for (const auto& row : t.rows) {
        out << "  nr=" << row.nr << " nz=" << row.nz << " dt=" << row.dt
            << " steps=" << row.steps;
        if (t.pi_tracked) out << "  err_Pi=" << row.err_pi;
        if (t.omega_tracked) out << "  err_Omega=" << row.err_omega;
        out << '\n';
    }
    out << "  order (finest pair):";
    if (t.pi_tracked) out << " Pi " << t.order_pi;
    if (t.omega_tracked) out << " Omega " << t.order_omega;
    if (!t.monotone) out << "  [non-monotone error sequence]";
    out << "\n  result: " << (t.pass ? "PASS" : "FAIL") << " (threshold "
        << t.threshold << ")\n";
}

}  // namespace axmhd
