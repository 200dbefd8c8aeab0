#pragma once

// Point evaluation of meridian fields: monotone (Steffen-limited) cubic
// or bilinear, with the parity fold across the axis, periodic z, and
// constant extension beyond the wall.  The cubic clamps each 1-D pass to
// its bracketing node values, so interpolated values can never leave the
// range spanned by the (sign-folded) stencil.

#include <algorithm>
#include <cmath>

#include "axmhd/grid.hpp"

namespace axmhd {

enum class Interp { MonotoneCubic, Linear };

namespace detail {

// Steffen-limited slope between secants a (left) and b (right): zero at
// sign changes, otherwise bounded by twice either secant.  Guarantees the
// Hermite piece has no interior extremum.
inline double steffen_slope(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    double m = std::min({0.5 * std::abs(a + b), 2.0 * std::abs(a), 2.0 * std::abs(b)});
    return a > 0.0 ? m : -m;
}

// Monotone cubic through (0,y0),(1,y1) with limited end slopes; the final
// clamp makes the bracketing bound exact in floating point.
inline double steffen_interp(double ym, double y0, double y1, double y2, double t) {
    double sl = steffen_slope(y0 - ym, y1 - y0);
    double sr = steffen_slope(y1 - y0, y2 - y1);
    double t2 = t * t, t3 = t2 * t;
    double v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * sl +
               (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * sr;
    return std::clamp(v, std::min(y0, y1), std::max(y0, y1));
}

// Stencil fetch in r: indices below the axis reflect with the parity sign
// (node -1-i mirrors node i), indices beyond the wall clamp (constant
// extension outside r_max).
inline double fetch_r(const ScalarField& f, int i, int j, double sign) {
    const int nr = f.grid.nr;
    if (i < 0) return sign * f(-1 - i, j);
    if (i >= nr) return f(nr - 1, j);
    return f(i, j);
}

struct LocR {
    int i0;       // left node of the bracketing pair (may be -1)
    double t;     // fraction in [0,1)
    double sign;  // parity sign applied to reflected fetches
};

inline LocR locate_r(const ScalarField& f, double r) {
    double sign = 1.0;
    if (r < 0.0) {
        r = -r;
        sign = (f.parity == Parity::Odd) ? -1.0 : 1.0;
    }
    double s = r / f.grid.dr - 0.5;
    // clamp before the int conversion; everything past the wall reads the
    // constant extension anyway
    if (s > double(f.grid.nr) + 1.0) s = double(f.grid.nr) + 1.0;
    double fl = std::floor(s);
    return {int(fl), s - fl, sign};
}

struct LocZ {
    int j0;
    double t;
};

inline LocZ locate_z(const CylGrid& g, double z) {
    double s = (z - g.z(0)) / g.dz;
    s -= std::floor(s / g.nz) * g.nz;  // reduce to [0, nz] before indexing
    double fl = std::floor(s);
    int j = int(fl) % g.nz;
    return {j, s - fl};
}

}  // namespace detail

// Point evaluation of a field at (r, z); r may be negative (parity fold),
// z wraps periodically, radii beyond the wall extend constantly.
inline double interpolate(const ScalarField& f, double r, double z,
                          Interp mode = Interp::MonotoneCubic) {
    const CylGrid& g = f.grid;
    auto lr = detail::locate_r(f, r);
    auto lz = detail::locate_z(g, z);
    if (mode == Interp::Linear) {
        int jp = (lz.j0 + 1) % g.nz;
        double a0 = detail::fetch_r(f, lr.i0, lz.j0, lr.sign);
        double a1 = detail::fetch_r(f, lr.i0 + 1, lz.j0, lr.sign);
        double b0 = detail::fetch_r(f, lr.i0, jp, lr.sign);
        double b1 = detail::fetch_r(f, lr.i0 + 1, jp, lr.sign);
        double va = a0 + lr.t * (a1 - a0);
        double vb = b0 + lr.t * (b1 - b0);
        return va + lz.t * (vb - va);
    }
    double line[4];
    for (int dj = -1; dj <= 2; ++dj) {
        int j = (lz.j0 + dj + 2 * g.nz) % g.nz;
        line[dj + 1] = detail::steffen_interp(detail::fetch_r(f, lr.i0 - 1, j, lr.sign),
                                              detail::fetch_r(f, lr.i0, j, lr.sign),
                                              detail::fetch_r(f, lr.i0 + 1, j, lr.sign),
                                              detail::fetch_r(f, lr.i0 + 2, j, lr.sign), lr.t);
    }
    return detail::steffen_interp(line[0], line[1], line[2], line[3], lz.t);
}

}  // namespace axmhd
