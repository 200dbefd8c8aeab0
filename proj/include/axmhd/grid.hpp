#pragma once

// Cell-centered cylindrical meridian grid and parity-tagged scalar fields.
//
// Radial nodes sit at r_i = (i + 1/2) dr so no node lies on the axis; the
// axis enters only through ghost values determined by the field's parity
// under r -> -r.  The z direction is periodic on [-z_len/2, z_len/2).

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace axmhd {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SizingError : Error { using Error::Error; };
struct ParityError : Error { using Error::Error; };
struct SolverError : Error { using Error::Error; };

enum class Parity : std::uint8_t { Even = 0, Odd = 1 };

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct CylGrid {
    int nr = 0;
    int nz = 0;
    double r_max = 0.0;
    double z_len = 0.0;
    double dr = 0.0;
    double dz = 0.0;

    double r(int i) const { return (i + 0.5) * dr; }
    double z(int j) const { return -0.5 * z_len + j * dz; }
    std::size_t size() const { return std::size_t(nr) * std::size_t(nz); }
    // r-index fastest; matches the on-disk field layout.
    std::size_t idx(int i, int j) const { return std::size_t(j) * nr + i; }

    bool operator==(const CylGrid&) const = default;
};

inline CylGrid make_grid(int nr, int nz, double r_max, double z_len) {
    if (nr <= 0 || nz <= 0)
        throw SizingError("make_grid: node counts must be positive, got nr=" +
                          std::to_string(nr) + " nz=" + std::to_string(nz));
    if (!is_power_of_two(nz))
        throw SizingError("make_grid: nz must be a power of two, got " + std::to_string(nz));
    if (!(r_max > 0.0) || !(z_len > 0.0))
        throw SizingError("make_grid: domain lengths must be positive, got r_max=" +
                          std::to_string(r_max) + " z_len=" + std::to_string(z_len));
    CylGrid g;
    g.nr = nr;
    g.nz = nz;
    g.r_max = r_max;
    g.z_len = z_len;
    g.dr = r_max / nr;
    g.dz = z_len / nz;
    return g;
}

struct ScalarField {
    CylGrid grid;
    Parity parity = Parity::Even;
    std::vector<double> v;

    ScalarField() = default;
    ScalarField(const CylGrid& g, Parity p) : grid(g), parity(p), v(g.size(), 0.0) {}

    double& operator()(int i, int j) { return v[grid.idx(i, j)]; }
    double operator()(int i, int j) const { return v[grid.idx(i, j)]; }

    // Ghost value across the axis: node (i, j) mirrors to radius -r_i.
    double axis_ghost(int i, int j) const {
        double val = (*this)(i, j);
        return parity == Parity::Even ? val : -val;
    }
};

inline void require_same_grid(const ScalarField& a, const ScalarField& b, const char* who) {
    if (!(a.grid == b.grid))
        throw SizingError(std::string(who) + ": fields live on different grids");
}

inline void require_parity(const ScalarField& f, Parity p, const char* who) {
    if (f.parity != p)
        throw ParityError(std::string(who) + ": expected " +
                          (p == Parity::Even ? "even" : "odd") + " parity field");
}

// --- construction -----------------------------------------------------------

inline ScalarField sample(const CylGrid& g, Parity p,
                          const std::function<double(double, double)>& f) {
    ScalarField out(g, p);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            double val = f(g.r(i), g.z(j));
            if (!std::isfinite(val))
                throw Error("sample: non-finite value at node (i=" + std::to_string(i) +
                            ", j=" + std::to_string(j) + "), r=" + std::to_string(g.r(i)) +
                            ", z=" + std::to_string(g.z(j)));
            out(i, j) = val;
        }
    return out;
}

// --- pointwise algebra ------------------------------------------------------

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "operator+");
    if (a.parity != b.parity) throw ParityError("operator+: parity mismatch");
    ScalarField out = a;
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] += b.v[k];
    return out;
}

inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "operator-");
    if (a.parity != b.parity) throw ParityError("operator-: parity mismatch");
    ScalarField out = a;
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] -= b.v[k];
    return out;
}

inline ScalarField operator*(double c, const ScalarField& a) {
    ScalarField out = a;
    for (double& x : out.v) x *= c;
    return out;
}

// Pointwise product; parity composes as (-1)^a (-1)^b.
inline ScalarField pointwise(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "pointwise");
    ScalarField out = a;
    out.parity = (a.parity == b.parity) ? Parity::Even : Parity::Odd;
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] *= b.v[k];
    return out;
}

inline ScalarField multiply_by_r(const ScalarField& a) {
    ScalarField out = a;
    out.parity = (a.parity == Parity::Even) ? Parity::Odd : Parity::Even;
    for (int j = 0; j < a.grid.nz; ++j)
        for (int i = 0; i < a.grid.nr; ++i) out(i, j) = a(i, j) * a.grid.r(i);
    return out;
}

// Safe because no node sits at r = 0.
inline ScalarField divide_by_r(const ScalarField& a) {
    ScalarField out = a;
    out.parity = (a.parity == Parity::Even) ? Parity::Odd : Parity::Even;
    for (int j = 0; j < a.grid.nz; ++j)
        for (int i = 0; i < a.grid.nr; ++i) out(i, j) = a(i, j) / a.grid.r(i);
    return out;
}

// --- derivatives ------------------------------------------------------------

// Central radial derivative.  The axis ghost comes from the parity fold,
// which makes the stencil exact for parity-matching polynomials up to
// degree 2; the wall row uses a second-order one-sided stencil.
inline ScalarField ddr(const ScalarField& f) {
    const CylGrid& g = f.grid;
    ScalarField out(g, f.parity == Parity::Even ? Parity::Odd : Parity::Even);
    const double inv2dr = 1.0 / (2.0 * g.dr);
    for (int j = 0; j < g.nz; ++j) {
        out(0, j) = (f(std::min(1, g.nr - 1), j) - f.axis_ghost(0, j)) * inv2dr;
        for (int i = 1; i < g.nr - 1; ++i)
            out(i, j) = (f(i + 1, j) - f(i - 1, j)) * inv2dr;
        if (g.nr >= 3) {
            int n = g.nr - 1;
            out(n, j) = (3.0 * f(n, j) - 4.0 * f(n - 1, j) + f(n - 2, j)) * inv2dr;
        }
    }
    return out;
}

// Central z derivative, periodic wrap; parity in r is untouched.
inline ScalarField ddz(const ScalarField& f) {
    const CylGrid& g = f.grid;
    ScalarField out(g, f.parity);
    const double inv2dz = 1.0 / (2.0 * g.dz);
    for (int j = 0; j < g.nz; ++j) {
        int jp = (j + 1) % g.nz;
        int jm = (j + g.nz - 1) % g.nz;
        for (int i = 0; i < g.nr; ++i)
            out(i, j) = (f(i, jp) - f(i, jm)) * inv2dz;
    }
    return out;
}

// Second radial derivative for diagnostic assembly (not used by solvers,
// which apply their own stencils).  Wall row: second-order one-sided.
inline ScalarField d2dr(const ScalarField& f) {
    const CylGrid& g = f.grid;
    ScalarField out(g, f.parity);
    const double invdr2 = 1.0 / (g.dr * g.dr);
    for (int j = 0; j < g.nz; ++j) {
        out(0, j) = (f(std::min(1, g.nr - 1), j) - 2.0 * f(0, j) + f.axis_ghost(0, j)) * invdr2;
        for (int i = 1; i < g.nr - 1; ++i)
            out(i, j) = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) * invdr2;
        if (g.nr >= 5) {
            int n = g.nr - 1;
            out(n, j) = (2.0 * f(n, j) - 5.0 * f(n - 1, j) + 4.0 * f(n - 2, j) - f(n - 3, j)) * invdr2;
        }
    }
    return out;
}

inline ScalarField d2dz(const ScalarField& f) {
    const CylGrid& g = f.grid;
    ScalarField out(g, f.parity);
    const double invdz2 = 1.0 / (g.dz * g.dz);
    for (int j = 0; j < g.nz; ++j) {
        int jp = (j + 1) % g.nz;
        int jm = (j + g.nz - 1) % g.nz;
        for (int i = 0; i < g.nr; ++i)
            out(i, j) = (f(i, jp) - 2.0 * f(i, j) + f(i, jm)) * invdz2;
    }
    return out;
}

// --- norms ------------------------------------------------------------------

// Weighted L^p over the solid of revolution: (sum |f|^p 2 pi r_i dr dz)^{1/p}.
// Midpoint quadrature; supported p: 2, 4, 6.
inline double lp_norm(const ScalarField& f, int p) {
    if (p != 2 && p != 4 && p != 6)
        throw Error("lp_norm: unsupported exponent p=" + std::to_string(p) +
                    " (supported: 2, 4, 6)");
    const CylGrid& g = f.grid;
    const double cell = 2.0 * M_PI * g.dr * g.dz;
    double acc = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            double a = std::abs(f(i, j));
            double ap = a * a;
            if (p >= 4) ap *= ap;          // a^4
            if (p == 6) ap *= a * a;       // a^6
            acc += ap * g.r(i);
        }
    return std::pow(acc * cell, 1.0 / p);
}

inline double linf_norm(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

inline double min_value(const ScalarField& f) {
    double m = f.v.empty() ? 0.0 : f.v[0];
    for (double x : f.v) m = std::min(m, x);
    return m;
}

inline double max_value(const ScalarField& f) {
    double m = f.v.empty() ? 0.0 : f.v[0];
    for (double x : f.v) m = std::max(m, x);
    return m;
}

// --- vector calculus --------------------------------------------------------

// Cylindrical divergence of a swirl-free meridian vector field:
// div u = d_r u^r + u^r / r + d_z u^z.
inline ScalarField divergence(const ScalarField& ur, const ScalarField& uz) {
    require_same_grid(ur, uz, "divergence");
    require_parity(ur, Parity::Odd, "divergence(ur)");
    require_parity(uz, Parity::Even, "divergence(uz)");
    ScalarField out = ddr(ur) + divide_by_r(ur) + ddz(uz);
    return out;
}

}  // namespace axmhd
