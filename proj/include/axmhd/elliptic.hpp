#pragma once

// Elliptic solves on the meridian grid: stream function recovery
// (Biot-Savart realized as a boundary value problem) and backward-Euler
// diffusion steps.  All solvers share one kernel: FFT diagonalization in
// the periodic z direction followed by a tridiagonal Thomas solve per
// mode in r.  The solves are direct; the residual of every solve is
// checked against the discrete operator and reported on failure.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "axmhd/fft.hpp"
#include "axmhd/grid.hpp"

namespace axmhd {

// Radial operator variants sharing the kernel.
//   ThetaLaplacian: d_rr + (1/r) d_r - 1/r^2 + d_zz   on Odd fields
//     (the theta-component Laplacian; also the stream operator acting on
//      the potential phi = psi / r).
//   EvenDiffusion:  d_rr + (3/r) d_r + d_zz           on Even fields
//     (Delta + (2/r) d_r, the diffusion operator of the reduced system).
enum class RadialOp { ThetaLaplacian, EvenDiffusion };

namespace detail {

struct RadialCoeffs {
    double lower, diag, upper;  // diag excludes the z eigenvalue
};

inline RadialCoeffs radial_coeffs(RadialOp op, double r, double dr) {
    const double invdr2 = 1.0 / (dr * dr);
    if (op == RadialOp::ThetaLaplacian)
        return {invdr2 - 1.0 / (2.0 * r * dr),
                -2.0 * invdr2 - 1.0 / (r * r),
                invdr2 + 1.0 / (2.0 * r * dr)};
    return {invdr2 - 3.0 / (2.0 * r * dr),
            -2.0 * invdr2,
            invdr2 + 3.0 / (2.0 * r * dr)};
}

inline Parity op_parity(RadialOp op) {
    return op == RadialOp::ThetaLaplacian ? Parity::Odd : Parity::Even;
}

}  // namespace detail

// (alpha I + beta L) x applied in real space with the same stencil the
// solver diagonalizes: parity ghost at the axis, homogeneous Dirichlet at
// the wall face r = r_max, periodic z.
inline ScalarField apply_helmholtz(const ScalarField& x, double alpha, double beta, RadialOp op) {
    require_parity(x, detail::op_parity(op), "apply_helmholtz");
    const CylGrid& g = x.grid;
    const double axis_sign = (x.parity == Parity::Even) ? 1.0 : -1.0;
    const double invdz2 = 1.0 / (g.dz * g.dz);
    ScalarField out(g, x.parity);
    for (int j = 0; j < g.nz; ++j) {
        int jp = (j + 1) % g.nz;
        int jm = (j + g.nz - 1) % g.nz;
        for (int i = 0; i < g.nr; ++i) {
            auto c = detail::radial_coeffs(op, g.r(i), g.dr);
            double xm = (i == 0) ? axis_sign * x(0, j) : x(i - 1, j);
            double xp = (i == g.nr - 1) ? -x(i, j) : x(i + 1, j);
            double lap = c.lower * xm + c.diag * x(i, j) + c.upper * xp +
                         (x(i, jp) - 2.0 * x(i, j) + x(i, jm)) * invdz2;
            out(i, j) = alpha * x(i, j) + beta * lap;
        }
    }
    return out;
}

// Direct solve of (alpha I + beta L) x = rhs.  Every call verifies its own
// residual; a residual above tol (relative, weighted L^2) raises SolverError.
inline ScalarField solve_helmholtz(const ScalarField& rhs, double alpha, double beta,
                                   RadialOp op, double tol = 1e-10) {
    require_parity(rhs, detail::op_parity(op), "solve_helmholtz");
    const CylGrid& g = rhs.grid;
    const int nr = g.nr, nz = g.nz, nk = nz / 2 + 1;
    const double axis_sign = (rhs.parity == Parity::Even) ? 1.0 : -1.0;

    std::vector<double> re = rhs.v;
    std::vector<std::complex<double>> sp(std::size_t(nr) * nk);
    fft::zline_forward(nr, nz, re.data(), sp.data());

    std::vector<double> lo(nr), dg(nr), up(nr), w(nr);
    std::vector<std::complex<double>> q(nr);
    for (int k = 0; k < nk; ++k) {
        double s = std::sin(M_PI * k / nz);
        double lambda = -4.0 / (g.dz * g.dz) * s * s;
        for (int i = 0; i < nr; ++i) {
            auto c = detail::radial_coeffs(op, g.r(i), g.dr);
            lo[i] = beta * c.lower;
            dg[i] = alpha + beta * (c.diag + lambda);
            up[i] = beta * c.upper;
        }
        dg[0] += axis_sign * lo[0];       // axis parity fold
        dg[nr - 1] -= up[nr - 1];         // Dirichlet at the wall face

        // Thomas elimination, complex right-hand side over real bands.
        std::complex<double>* d = &sp[std::size_t(k) * nr];
        w[0] = dg[0];
        q[0] = d[0];
        for (int i = 1; i < nr; ++i) {
            double m = lo[i] / w[i - 1];
            w[i] = dg[i] - m * up[i - 1];
            q[i] = d[i] - m * q[i - 1];
        }
        d[nr - 1] = q[nr - 1] / w[nr - 1];
        for (int i = nr - 2; i >= 0; --i)
            d[i] = (q[i] - up[i] * d[i + 1]) / w[i];
    }

    fft::zline_inverse(nr, nz, sp.data(), re.data());
    ScalarField x(g, rhs.parity);
    for (std::size_t n = 0; n < x.v.size(); ++n) x.v[n] = re[n] / nz;

    double rhs_norm = lp_norm(rhs, 2);
    double res = lp_norm(apply_helmholtz(x, alpha, beta, op) - rhs, 2);
    // negated comparison so a non-finite residual also fails
    if (!(res <= tol * std::max(rhs_norm, 1e-300)))
        throw SolverError("solve_helmholtz: residual " + std::to_string(res) +
                          " exceeds tolerance (rhs norm " + std::to_string(rhs_norm) + ")");
    return x;
}

// --- stream function --------------------------------------------------------

struct StreamFunction {
    ScalarField psi;     // Even; psi = r * phi, vanishes like r^2 at the axis
    ScalarField phi;     // Odd potential the solve works on (phi = psi / r)
    ScalarField source;  // the omega_theta the solve was fed
};

// Solves d_rr psi - (1/r) d_r psi + d_zz psi = -r omega_theta with
// psi(r_max) = 0 and periodic z, via the substitution psi = r phi which
// turns the operator into the theta-component Laplacian acting on Odd phi.
inline StreamFunction solve_stream(const ScalarField& omega_theta) {
    require_parity(omega_theta, Parity::Odd, "solve_stream");
    ScalarField neg = -1.0 * omega_theta;
    ScalarField phi = solve_helmholtz(neg, 0.0, 1.0, RadialOp::ThetaLaplacian);
    StreamFunction s{multiply_by_r(phi), std::move(phi), omega_theta};
    return s;
}

// --- velocity ---------------------------------------------------------------

struct FlowField {
    ScalarField ur;         // Odd
    ScalarField uz;         // Even
    ScalarField ur_over_r;  // Even; finite at the axis
    StreamFunction stream;
};

inline FlowField velocity_from_stream(const StreamFunction& s) {
    require_parity(s.psi, Parity::Even, "velocity_from_stream");
    FlowField f;
    f.ur = -1.0 * divide_by_r(ddz(s.psi));
    f.uz = divide_by_r(ddr(s.psi));
    f.ur_over_r = divide_by_r(f.ur);
    f.stream = s;
    return f;
}

inline FlowField biot_savart(const ScalarField& omega_theta) {
    return velocity_from_stream(solve_stream(omega_theta));
}

// Wraps externally supplied velocity components (uniform flows in tests,
// frozen-flow configurations); the stream slot holds zero fields.
inline FlowField make_flow(const ScalarField& ur, const ScalarField& uz) {
    require_same_grid(ur, uz, "make_flow");
    require_parity(ur, Parity::Odd, "make_flow(ur)");
    require_parity(uz, Parity::Even, "make_flow(uz)");
    FlowField f;
    f.ur = ur;
    f.uz = uz;
    f.ur_over_r = divide_by_r(ur);
    f.stream = StreamFunction{ScalarField(ur.grid, Parity::Even),
                              ScalarField(ur.grid, Parity::Odd),
                              ScalarField(ur.grid, Parity::Odd)};
    return f;
}

// --- diffusion --------------------------------------------------------------

// One backward-Euler step of the reduced-system diffusion operator:
// (I - nu dt (Delta + (2/r) d_r)) X = rhs on Even fields.  nu dt = 0 is an
// exact identity.  The folded matrix is an M-matrix with unit row sums in
// the interior, so max |X| never exceeds max |rhs|.
inline ScalarField solve_diffusion(const ScalarField& rhs, double dt, double nu) {
    require_parity(rhs, Parity::Even, "solve_diffusion");
    if (nu * dt == 0.0) return rhs;
    return solve_helmholtz(rhs, 1.0, -nu * dt, RadialOp::EvenDiffusion);
}

// Same step for the theta-component Laplacian on Odd fields
// (the vorticity form of the diffusion term).
inline ScalarField solve_theta_diffusion(const ScalarField& rhs, double dt, double nu) {
    require_parity(rhs, Parity::Odd, "solve_theta_diffusion");
    if (nu * dt == 0.0) return rhs;
    return solve_helmholtz(rhs, 1.0, -nu * dt, RadialOp::ThetaLaplacian);
}

// (Delta - 1/r^2) f for Odd fields, e.g. the vector Laplacian of a pure
// theta vector; diagnostic use.
inline ScalarField apply_theta_laplacian(const ScalarField& f) {
    return apply_helmholtz(f, 0.0, 1.0, RadialOp::ThetaLaplacian);
}

}  // namespace axmhd
