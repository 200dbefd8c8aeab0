/// @file test_evolve.cpp
/// Semi-Lagrangian transport, the split step, CFL sizing, forcing hooks,
/// and the primitive-variable vorticity path.  The transport bound checks
/// are exact comparisons: the limited interpolant clamps to bracketing
/// node values, so no tolerance is owed.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "axmhd/evolve.hpp"
#include "test_util.hpp"

using namespace axmhd;

namespace {

double gauss(double r, double z) { return std::exp(-r * r - z * z); }

FlowField uniform_axial_flow(const CylGrid& g, double w) {
    return make_flow(ScalarField(g, Parity::Odd),
                     sample(g, Parity::Even, [w](double, double) { return w; }));
}

}  // namespace

TEST_CASE("zero velocity transport is the identity, bit for bit") {
    CylGrid g = make_grid(32, 64, 4.0, 8.0);
    ScalarField f = testutil::random_even(g, 42);
    FlowField still = make_flow(ScalarField(g, Parity::Odd), ScalarField(g, Parity::Even));
    ScalarField out = advect_sl(f, still, 0.37);
    CHECK(out.v == f.v);
}

TEST_CASE("uniform axial transport translates the profile") {
    double errs[2];
    int idx = 0;
    for (int n : {64, 128}) {
        CylGrid g = make_grid(n, 2 * n, 4.0, 8.0);
        ScalarField f = sample(g, Parity::Even, gauss);
        FlowField flow = uniform_axial_flow(g, 1.0);
        const double dt = 0.1;
        ScalarField cur = f;
        for (int s = 0; s < 5; ++s) cur = advect_sl(cur, flow, dt);
        double e = 0.0;
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.nr; ++i)
                e = std::max(e, std::abs(cur(i, j) - gauss(g.r(i), g.z(j) - 0.5)));
        errs[idx++] = e;
    }
    CHECK(errs[1] < 2e-2);
    CHECK(std::log2(errs[0] / errs[1]) > 1.7);
}

TEST_CASE("transport never escapes the initial bounds") {
    CylGrid g = make_grid(48, 64, 4.0, 8.0);
    ScalarField f = testutil::random_even(g, 7);
    double lo = min_value(f), hi = max_value(f);

    // a deliberately strong swirl so feet cross the axis and the wall zone
    ScalarField w = sample(g, Parity::Odd, [](double r, double z) {
        return 3.0 * r * std::exp(-r * r) * std::cos(2.0 * M_PI * z / 8.0);
    });
    FlowField flow = biot_savart(w);

    ScalarField cur = f;
    for (int s = 0; s < 20; ++s) {
        cur = advect_sl(cur, flow, 0.05);
        CHECK(min_value(cur) >= lo);
        CHECK(max_value(cur) <= hi);
    }

    SECTION("linear interpolation obeys the same bounds") {
        cur = f;
        for (int s = 0; s < 10; ++s) {
            cur = advect_sl(cur, flow, 0.05, Interp::Linear);
            CHECK(min_value(cur) >= lo);
            CHECK(max_value(cur) <= hi);
        }
    }

    SECTION("odd fields stay inside the reflected range") {
        ScalarField fo = testutil::random_odd(g, 13);
        double m = linf_norm(fo);
        ScalarField co = fo;
        for (int s = 0; s < 10; ++s) {
            co = advect_sl(co, flow, 0.05);
            CHECK(linf_norm(co) <= m);
        }
    }
}

TEST_CASE("source_omega matches the analytic form") {
    CylGrid g = make_grid(64, 128, 4.0, 8.0);

    SECTION("z-independent Pi gives zero source exactly") {
        ScalarField pi = sample(g, Parity::Even, [](double r, double) { return std::exp(-r * r); });
        CHECK(linf_norm(source_omega(pi)) == 0.0);
    }

    SECTION("zero Pi gives zero") {
        CHECK(linf_norm(source_omega(ScalarField(g, Parity::Even))) == 0.0);
    }

    SECTION("Gaussian Pi converges to 4 z exp(-2r^2-2z^2)") {
        double errs[2];
        int idx = 0;
        for (int n : {64, 128}) {
            CylGrid gg = make_grid(n, 2 * n, 4.0, 8.0);
            ScalarField pi = sample(gg, Parity::Even, gauss);
            ScalarField src = source_omega(pi);
            double e = 0.0;
            for (int j = 0; j < gg.nz; ++j)
                for (int i = 0; i < gg.nr; ++i) {
                    double r = gg.r(i), z = gg.z(j);
                    e = std::max(e, std::abs(src(i, j) -
                                             4.0 * z * std::exp(-2.0 * r * r - 2.0 * z * z)));
                }
            errs[idx++] = e;
        }
        CHECK(std::log2(errs[0] / errs[1]) > 1.8);
    }
}

TEST_CASE("cfl_dt follows the stated formula") {
    CylGrid g = make_grid(64, 128, 4.0, 8.0);  // dr = 1/16, dz = 1/16
    StepParams p;
    p.cfl = 0.5;
    p.dt_max = 10.0;

    SECTION("a 4x top speed gives dt = 0.5 * (1/16) / 4 = 0.0078125 exactly") {
        FlowField flow = uniform_axial_flow(g, 4.0);
        CHECK(cfl_dt_from_flow(flow, p) == 0.0078125);
    }

    SECTION("rest state hits dt_max via the velocity floor") {
        p.dt_max = 0.02;
        FlowField flow = uniform_axial_flow(g, 0.0);
        CHECK(cfl_dt_from_flow(flow, p) == 0.02);
    }
}

TEST_CASE("zero state is a fixed point of step") {
    CylGrid g = make_grid(32, 64, 4.0, 8.0);
    State s = make_state(g, ScalarField(g, Parity::Even), ScalarField(g, Parity::Even));
    StepParams p;
    State n = step(s, p);
    CHECK(linf_norm(n.pi) == 0.0);
    CHECK(linf_norm(n.omega) == 0.0);
    CHECK(n.t == p.dt_max);
    CHECK(n.step_index == 1);
}

TEST_CASE("Pi = 0 reduces the step to pure hydrodynamics") {
    CylGrid g = make_grid(48, 64, 4.0, 8.0);
    ScalarField om = testutil::random_even(g, 3);
    State s = make_state(g, ScalarField(g, Parity::Even), om);
    StepParams p;

    State cur = s;
    for (int k = 0; k < 5; ++k) {
        FlowField flow = biot_savart(omega_theta(cur));
        double dt = cfl_dt_from_flow(flow, p);
        State next = step_with_flow(cur, flow, dt, p);
        CHECK(linf_norm(next.pi) == 0.0);

        // the same substeps with the magnetic source dropped
        ScalarField ns = advect_sl(cur.omega, flow, dt, p.interp);
        ns = solve_diffusion(ns, dt, p.nu);
        CHECK(next.omega.v == ns.v);
        cur = next;
    }
}

TEST_CASE("step_forced with empty forcings reproduces step exactly") {
    CylGrid g = make_grid(32, 64, 4.0, 8.0);
    State s = make_state(g, testutil::random_even(g, 21), testutil::random_even(g, 22));
    StepParams p;
    State a = step(s, p);
    State b = step_forced(s, p, nullptr, nullptr);
    CHECK(a.pi.v == b.pi.v);
    CHECK(a.omega.v == b.omega.v);
    CHECK(a.t == b.t);
}

TEST_CASE("manufactured forcing holds the steady state at O(h^2)") {
    // steady manufactured pair: u = 0 frozen, Pi* = 0,
    // Omega* = (1-r^2) exp(-r^2-z^2), F = -nu (Delta + (2/r) d_r) Omega*
    Forcing f_om = [](double r, double z, double) {
        return 2.0 * (2.0 * r * r * r * r + 2.0 * r * r * z * z - 11.0 * r * r -
                      2.0 * z * z + 9.0) * gauss(r, z);
    };
    StepParams p;
    double errs[2];
    int idx = 0;
    for (int n : {64, 128}) {
        CylGrid g = make_grid(n, 2 * n, 4.0, 8.0);
        ScalarField om_star = sample(g, Parity::Even, [](double r, double z) {
            return (1.0 - r * r) * gauss(r, z);
        });
        State s = make_state(g, ScalarField(g, Parity::Even), om_star);
        FlowField still = make_flow(ScalarField(g, Parity::Odd), ScalarField(g, Parity::Even));
        double dt = 0.64 / n;  // dt shrinks with h
        for (int k = 0; k < 10; ++k) s = step_forced(s, p, nullptr, f_om, still, dt);
        errs[idx++] = lp_norm(s.omega - om_star, 2) / lp_norm(om_star, 2);
    }
    INFO("steady-state hold errors " << errs[0] << " " << errs[1]);
    CHECK(errs[0] < 5e-2);
    CHECK(errs[1] < 0.40 * errs[0]);
}

TEST_CASE("blow-up guard trips on runaway vorticity") {
    CylGrid g = make_grid(16, 16, 1.0, 1.0);
    ScalarField tiny = sample(g, Parity::Even, [](double r, double z) {
        return 1e-3 * std::exp(-r * r - z * z);
    });
    State s = make_state(g, ScalarField(g, Parity::Even), tiny);
    // forge a runaway value; the guard scale stays at the initial 1e-3
    s.omega(4, 4) = 2e3 * s.guard_scale * 1e6 / 1e6 * 1e6;
    StepParams p;
    CHECK_THROWS_AS(step(s, p), BlowupError);

    SECTION("a zero initial state never trips the guard") {
        State z = make_state(g, ScalarField(g, Parity::Even), ScalarField(g, Parity::Even));
        CHECK(z.guard_scale == 0.0);
        CHECK_NOTHROW(step(z, p));
    }
}

TEST_CASE("primitive vorticity path preserves special states") {
    CylGrid g = make_grid(48, 64, 4.0, 8.0);
    StepParams p;
    FlowField still = make_flow(ScalarField(g, Parity::Odd), ScalarField(g, Parity::Even));

    SECTION("zero stays zero") {
        ScalarField w = evolve_omega_primitive(ScalarField(g, Parity::Odd),
                                               ScalarField(g, Parity::Odd), still, 0.02, p);
        CHECK(linf_norm(w) == 0.0);
    }

    SECTION("z-independent magnetic field drives nothing at rest") {
        ScalarField b = sample(g, Parity::Odd, [](double r, double) {
            return r * std::exp(-r * r);
        });
        ScalarField w = evolve_omega_primitive(ScalarField(g, Parity::Odd), b, still, 0.02, p);
        CHECK(linf_norm(w) == 0.0);
    }
}

TEST_CASE("reduced and primitive paths stay close over ten steps") {
    CylGrid g = make_grid(64, 128, 4.0, 8.0);
    ScalarField pi0 = sample(g, Parity::Even, gauss);
    ScalarField om0 = sample(g, Parity::Even, [](double r, double z) {
        return (1.0 - r * r) * gauss(r, z);
    });
    StepParams p;

    State red = make_state(g, pi0, om0);
    ScalarField w = multiply_by_r(om0);   // primitive vorticity
    ScalarField b = multiply_by_r(pi0);   // primitive magnetic field
    double t = 0.0;

    for (int k = 0; k < 10; ++k) {
        FlowField flow_r = biot_savart(omega_theta(red));
        FlowField flow_p = biot_savart(w);
        double dt = std::min(cfl_dt_from_flow(flow_r, p), cfl_dt_from_flow(flow_p, p));
        red = step_with_flow(red, flow_r, dt, p);
        ScalarField w_next = evolve_omega_primitive(w, b, flow_p, dt, p);
        // B_theta = r Pi obeys d_t B + u.grad B = (u^r/r) B
        ScalarField b1 = advect_sl(b, flow_p, dt, p.interp);
        ScalarField bs = pointwise(flow_p.ur_over_r, b1);
        for (std::size_t n = 0; n < b1.v.size(); ++n) b1.v[n] += dt * bs.v[n];
        b = b1;
        w = w_next;
        t += dt;
    }

    double rel = lp_norm(multiply_by_r(red.omega) - w, 2) / lp_norm(w, 2);
    INFO("relative omega_theta gap after 10 steps: " << rel);
    CHECK(rel < 0.10);
}
