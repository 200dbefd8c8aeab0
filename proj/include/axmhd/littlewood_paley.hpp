#pragma once

// Dyadic (Littlewood-Paley) analysis on a periodic Cartesian box wrapping
// the meridian domain: box lengths (2 r_max, 2 r_max, z_len).  The radial
// cutoff chi is a quintic smoothstep, identically 1 inside |xi| <= 3/4 and
// 0 outside |xi| >= 4/3; the shell filters phi_q(xi) = chi(xi/2^{q+1}) -
// chi(xi/2^q) telescope, so chi + sum_q phi_q equals 1 exactly at every
// lattice frequency once the top shell clears the lattice corner.  All
// block operations are exact spectral multipliers.

#include <complex>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "axmhd/fft.hpp"
#include "axmhd/grid.hpp"
#include "axmhd/interp.hpp"

namespace axmhd {

inline constexpr int kLinf = -1;  // Lebesgue/summation exponent "infinity"

enum class ComponentTag { Scalar, ThetaVector, MeridianVector };

struct CartesianField3D {
    int n = 0;
    double lx = 0, ly = 0, lz = 0;
    ComponentTag tag = ComponentTag::Scalar;
    std::vector<std::vector<double>> comps;  // 1 array (Scalar) or 3

    std::size_t points() const { return std::size_t(n) * n * n; }
    std::size_t idx(int ix, int iy, int iz) const {
        return (std::size_t(ix) * n + iy) * n + iz;
    }
    double volume() const { return lx * ly * lz; }

    static CartesianField3D zeros(int n, double lx, double ly, double lz, ComponentTag tag) {
        CartesianField3D f;
        f.n = n;
        f.lx = lx;
        f.ly = ly;
        f.lz = lz;
        f.tag = tag;
        f.comps.assign(tag == ComponentTag::Scalar ? 1 : 3,
                       std::vector<double>(std::size_t(n) * n * n, 0.0));
        return f;
    }
};

// --- embedding --------------------------------------------------------------

namespace detail {

inline void check_box_n(int n) {
    if (!is_power_of_two(n))
        throw SizingError("embed: box resolution must be a positive power of two, got " +
                          std::to_string(n));
}

}  // namespace detail

// Scalar meridian field sampled onto the box by bilinear interpolation
// (parity fold across the axis, constant extension past the wall).
inline CartesianField3D embed_scalar(const ScalarField& f, int n,
                                     Interp mode = Interp::Linear) {
    detail::check_box_n(n);
    const CylGrid& g = f.grid;
    auto out = CartesianField3D::zeros(n, 2.0 * g.r_max, 2.0 * g.r_max, g.z_len,
                                       ComponentTag::Scalar);
    const double hx = out.lx / n, hy = out.ly / n, hz = out.lz / n;
    for (int ix = 0; ix < n; ++ix) {
        double x = -g.r_max + ix * hx;
        for (int iy = 0; iy < n; ++iy) {
            double y = -g.r_max + iy * hy;
            double rad = std::hypot(x, y);
            for (int iz = 0; iz < n; ++iz) {
                double z = -0.5 * g.z_len + iz * hz;
                out.comps[0][out.idx(ix, iy, iz)] = interpolate(f, rad, z, mode);
            }
        }
    }
    return out;
}

// theta-directed vector field B_theta e_theta: components
// (-y, x, 0) * (B_theta / r), the even ratio staying finite on the axis.
inline CartesianField3D embed_theta(const ScalarField& btheta, int n,
                                    Interp mode = Interp::Linear) {
    detail::check_box_n(n);
    require_parity(btheta, Parity::Odd, "embed_theta");
    const CylGrid& g = btheta.grid;
    ScalarField ratio = divide_by_r(btheta);  // Even
    auto out = CartesianField3D::zeros(n, 2.0 * g.r_max, 2.0 * g.r_max, g.z_len,
                                       ComponentTag::ThetaVector);
    const double hx = out.lx / n, hy = out.ly / n, hz = out.lz / n;
    for (int ix = 0; ix < n; ++ix) {
        double x = -g.r_max + ix * hx;
        for (int iy = 0; iy < n; ++iy) {
            double y = -g.r_max + iy * hy;
            double rad = std::hypot(x, y);
            for (int iz = 0; iz < n; ++iz) {
                double z = -0.5 * g.z_len + iz * hz;
                double w = interpolate(ratio, rad, z, mode);
                std::size_t k = out.idx(ix, iy, iz);
                out.comps[0][k] = -y * w;
                out.comps[1][k] = x * w;
            }
        }
    }
    return out;
}

// Swirl-free meridian vector field (u^r e_r + u^z e_z): horizontal
// components x,y * (u^r / r), axial component u^z.
inline CartesianField3D embed_meridian(const ScalarField& ur, const ScalarField& uz, int n,
                                       Interp mode = Interp::Linear) {
    detail::check_box_n(n);
    require_same_grid(ur, uz, "embed_meridian");
    require_parity(ur, Parity::Odd, "embed_meridian(ur)");
    require_parity(uz, Parity::Even, "embed_meridian(uz)");
    const CylGrid& g = ur.grid;
    ScalarField ratio = divide_by_r(ur);  // Even
    auto out = CartesianField3D::zeros(n, 2.0 * g.r_max, 2.0 * g.r_max, g.z_len,
                                       ComponentTag::MeridianVector);
    const double hx = out.lx / n, hy = out.ly / n, hz = out.lz / n;
    for (int ix = 0; ix < n; ++ix) {
        double x = -g.r_max + ix * hx;
        for (int iy = 0; iy < n; ++iy) {
            double y = -g.r_max + iy * hy;
            double rad = std::hypot(x, y);
            for (int iz = 0; iz < n; ++iz) {
                double z = -0.5 * g.z_len + iz * hz;
                double w = interpolate(ratio, rad, z, mode);
                std::size_t k = out.idx(ix, iy, iz);
                out.comps[0][k] = x * w;
                out.comps[1][k] = y * w;
                out.comps[2][k] = interpolate(uz, rad, z, mode);
            }
        }
    }
    return out;
}

// --- filters ----------------------------------------------------------------

namespace detail {

inline double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace detail

struct DyadicFilterBank {
    int n = 0;
    double lx = 0, ly = 0, lz = 0;
    int q_min = -1;
    int q_max = 0;
    bool corrupt = false;  // test hook: spoils the partition of unity

    // radial cutoff: 1 on [0, 3/4], quintic descent, 0 on [4/3, inf)
    double chi(double s) const {
        return 1.0 - detail::smoothstep5((s - 0.75) / (4.0 / 3.0 - 0.75));
    }
    // shell filter at scale 2^q; the corrupt hook inflates even-q shells,
    // which breaks the telescoping sum and must be caught downstream
    double phi(int q, double s) const {
        double h = std::ldexp(1.0, -q);  // 2^{-q}
        double v = chi(0.5 * h * s) - chi(h * s);
        if (corrupt && q % 2 == 0) v *= 1.01;
        return v;
    }
    // largest lattice frequency magnitude on the box
    double corner() const {
        double fx = M_PI * n / lx, fy = M_PI * n / ly, fz = M_PI * n / lz;
        return std::sqrt(fx * fx + fy * fy + fz * fz);
    }
};

// Minimal q_max whose cumulative cutoff covers every lattice frequency:
// chi(2^{-(q_max+1)} |xi|) = 1 requires 2^{-(q_max+1)} corner <= 3/4.
inline int coverage_q_max(const DyadicFilterBank& b) {
    int q = 0;
    while (std::ldexp(0.75, q + 1) < b.corner()) ++q;
    return q;
}

inline DyadicFilterBank make_filter_bank(int n, double lx, double ly, double lz,
                                         std::optional<int> q_max = {}) {
    if (!is_power_of_two(n))
        throw SizingError("make_filter_bank: n must be a power of two, got " + std::to_string(n));
    if (!(lx > 0) || !(ly > 0) || !(lz > 0))
        throw SizingError("make_filter_bank: box lengths must be positive");
    DyadicFilterBank b;
    b.n = n;
    b.lx = lx;
    b.ly = ly;
    b.lz = lz;
    int cover = coverage_q_max(b);
    if (q_max) {
        if (*q_max < cover)
            throw SizingError("make_filter_bank: q_max=" + std::to_string(*q_max) +
                              " leaves lattice frequencies uncovered (need " +
                              std::to_string(cover) + ")");
        if (std::ldexp(0.75, *q_max) >= b.corner())
            throw SizingError("make_filter_bank: q_max=" + std::to_string(*q_max) +
                              " puts the top shell beyond the lattice corner (max useful " +
                              std::to_string(cover) + ")");
        b.q_max = *q_max;
    } else {
        b.q_max = cover;
    }
    return b;
}

// --- spectral machinery ------------------------------------------------------

namespace detail {

// Iterates the r2c half-spectrum, handing the callback the flat spectral
// index, |xi|^2, the signed frequency vector, and the Hermitian weight
// (1 for self-conjugate kz planes, 2 otherwise).
template <typename F>
inline void for_each_mode(int n, double lx, double ly, double lz, F&& f) {
    const int nzk = n / 2 + 1;
    for (int ix = 0; ix < n; ++ix) {
        int kx = ix <= n / 2 ? ix : ix - n;
        double xix = 2.0 * M_PI * kx / lx;
        for (int iy = 0; iy < n; ++iy) {
            int ky = iy <= n / 2 ? iy : iy - n;
            double xiy = 2.0 * M_PI * ky / ly;
            for (int iz = 0; iz < nzk; ++iz) {
                double xiz = 2.0 * M_PI * iz / lz;
                double xi2 = xix * xix + xiy * xiy + xiz * xiz;
                double wgt = (iz == 0 || iz == n / 2) ? 1.0 : 2.0;
                std::size_t k = (std::size_t(ix) * n + iy) * nzk + iz;
                f(k, xi2, xix, xiy, xiz, wgt);
            }
        }
    }
}

inline void require_bank_match(const CartesianField3D& f, const DyadicFilterBank& b,
                               const char* who) {
    if (f.n != b.n || f.lx != b.lx || f.ly != b.ly || f.lz != b.lz)
        throw SizingError(std::string(who) + ": field and filter bank shapes differ");
}

}  // namespace detail

// Applies a real-valued spectral multiplier m(|xi|^2) to every component.
template <typename Mult>
inline CartesianField3D spectral_filter(const CartesianField3D& f, Mult&& mult) {
    const int n = f.n;
    CartesianField3D out = CartesianField3D::zeros(n, f.lx, f.ly, f.lz, f.tag);
    const std::size_t nsp = std::size_t(n) * n * (n / 2 + 1);
    std::vector<std::complex<double>> sp(nsp);
    std::vector<double> re(f.points());
    const double scale = 1.0 / double(f.points());
    for (std::size_t c = 0; c < f.comps.size(); ++c) {
        re = f.comps[c];
        fft::box_forward(n, re.data(), sp.data());
        detail::for_each_mode(n, f.lx, f.ly, f.lz,
                              [&](std::size_t k, double xi2, double, double, double, double) {
                                  sp[k] *= mult(xi2);
                              });
        fft::box_inverse(n, sp.data(), out.comps[c].data());
        for (double& v : out.comps[c]) v *= scale;
    }
    return out;
}

struct DyadicDecomposition {
    DyadicFilterBank bank;
    ComponentTag tag = ComponentTag::Scalar;
    std::vector<CartesianField3D> blocks;  // index q - q_min, q = -1 .. q_max

    const CartesianField3D& block(int q) const { return blocks[q - bank.q_min]; }
};

// Full dyadic decomposition: block -1 is the low-pass chi, blocks 0..q_max
// the annular shells.  Sum of blocks reconstructs the field exactly (up to
// rounding) because the filters partition unity on the lattice.
inline DyadicDecomposition decompose(const CartesianField3D& f, const DyadicFilterBank& bank) {
    detail::require_bank_match(f, bank, "decompose");
    DyadicDecomposition d;
    d.bank = bank;
    d.tag = f.tag;

    const int n = f.n;
    const std::size_t nsp = std::size_t(n) * n * (n / 2 + 1);
    const double scale = 1.0 / double(f.points());
    std::vector<std::vector<std::complex<double>>> spectra(f.comps.size());
    {
        std::vector<double> re(f.points());
        for (std::size_t c = 0; c < f.comps.size(); ++c) {
            spectra[c].resize(nsp);
            re = f.comps[c];
            fft::box_forward(n, re.data(), spectra[c].data());
        }
    }

    std::vector<std::complex<double>> work(nsp);
    for (int q = bank.q_min; q <= bank.q_max; ++q) {
        CartesianField3D blk = CartesianField3D::zeros(n, f.lx, f.ly, f.lz, f.tag);
        for (std::size_t c = 0; c < f.comps.size(); ++c) {
            detail::for_each_mode(
                n, f.lx, f.ly, f.lz,
                [&](std::size_t k, double xi2, double, double, double, double) {
                    double s = std::sqrt(xi2);
                    double m = (q == -1) ? bank.chi(s) : bank.phi(q, s);
                    work[k] = spectra[c][k] * m;
                });
            fft::box_inverse(n, work.data(), blk.comps[c].data());
            for (double& v : blk.comps[c]) v *= scale;
        }
        d.blocks.push_back(std::move(blk));
    }
    return d;
}

inline CartesianField3D reconstruct(const DyadicDecomposition& d) {
    CartesianField3D out = d.blocks.front();
    for (std::size_t b = 1; b < d.blocks.size(); ++b)
        for (std::size_t c = 0; c < out.comps.size(); ++c)
            for (std::size_t k = 0; k < out.comps[c].size(); ++k)
                out.comps[c][k] += d.blocks[b].comps[c][k];
    return out;
}

// Max over the r2c lattice of |chi + sum_q phi_q - 1|.
inline double partition_defect(const DyadicFilterBank& bank) {
    double worst = 0.0;
    detail::for_each_mode(bank.n, bank.lx, bank.ly, bank.lz,
                          [&](std::size_t, double xi2, double, double, double, double) {
                              double s = std::sqrt(xi2);
                              double sum = bank.chi(s);
                              for (int q = 0; q <= bank.q_max; ++q) sum += bank.phi(q, s);
                              worst = std::max(worst, std::abs(sum - 1.0));
                          });
    return worst;
}

// --- box norms ---------------------------------------------------------------

// L^p over the box, p in {2, 4, 6, kLinf}; vector fields use the pointwise
// Euclidean magnitude.
inline double box_lp_norm(const CartesianField3D& f, int p) {
    if (p != 2 && p != 4 && p != 6 && p != kLinf)
        throw Error("box_lp_norm: unsupported exponent " + std::to_string(p));
    const std::size_t npts = f.points();
    double acc = 0.0, mx = 0.0;
    for (std::size_t k = 0; k < npts; ++k) {
        double m2 = 0.0;
        for (const auto& c : f.comps) m2 += c[k] * c[k];
        if (p == kLinf) {
            mx = std::max(mx, m2);
        } else {
            double v = m2;                     // |f|^2
            if (p >= 4) v *= v;                // |f|^4
            if (p == 6) v *= m2;               // |f|^6
            acc += v;
        }
    }
    if (p == kLinf) return std::sqrt(mx);
    double dv = f.volume() / double(npts);
    return std::pow(acc * dv, 1.0 / p);
}

// Plancherel L^2 norm of the gradient (all components): no inverse
// transform, so Nyquist sign ambiguity never arises.
inline double grad_l2_box(const CartesianField3D& f) {
    const int n = f.n;
    const std::size_t nsp = std::size_t(n) * n * (n / 2 + 1);
    std::vector<std::complex<double>> sp(nsp);
    std::vector<double> re(f.points());
    double acc = 0.0;
    for (const auto& comp : f.comps) {
        re = comp;
        fft::box_forward(n, re.data(), sp.data());
        detail::for_each_mode(n, f.lx, f.ly, f.lz,
                              [&](std::size_t k, double xi2, double, double, double, double w) {
                                  acc += w * xi2 * std::norm(sp[k]);
                              });
    }
    double npts = double(f.points());
    return std::sqrt(acc * f.volume() / (npts * npts));
}

// sqrt(sum (1+|xi|^2)^s |xi|^2 |u_hat|^2): Sobolev-weighted gradient norm,
// used for the H^{3/2} gradient monitor (s = 3/2).
inline double grad_hs_box(const CartesianField3D& f, double s) {
    const int n = f.n;
    const std::size_t nsp = std::size_t(n) * n * (n / 2 + 1);
    std::vector<std::complex<double>> sp(nsp);
    std::vector<double> re(f.points());
    double acc = 0.0;
    for (const auto& comp : f.comps) {
        re = comp;
        fft::box_forward(n, re.data(), sp.data());
        detail::for_each_mode(n, f.lx, f.ly, f.lz,
                              [&](std::size_t k, double xi2, double, double, double, double w) {
                                  acc += w * std::pow(1.0 + xi2, s) * xi2 * std::norm(sp[k]);
                              });
    }
    double npts = double(f.points());
    return std::sqrt(acc * f.volume() / (npts * npts));
}

// --- Besov / Chemin-Lerner ----------------------------------------------------

// ||Delta_q f||_{L^p} for q = q_min..q_max without storing the blocks.
inline std::vector<double> block_lp_norms(const CartesianField3D& f,
                                          const DyadicFilterBank& bank, int p) {
    detail::require_bank_match(f, bank, "block_lp_norms");
    const int n = f.n;
    const std::size_t nsp = std::size_t(n) * n * (n / 2 + 1);
    const double scale = 1.0 / double(f.points());
    std::vector<std::vector<std::complex<double>>> spectra(f.comps.size());
    {
        std::vector<double> re(f.points());
        for (std::size_t c = 0; c < f.comps.size(); ++c) {
            spectra[c].resize(nsp);
            re = f.comps[c];
            fft::box_forward(n, re.data(), spectra[c].data());
        }
    }
    CartesianField3D blk = CartesianField3D::zeros(n, f.lx, f.ly, f.lz, f.tag);
    std::vector<std::complex<double>> work(nsp);
    std::vector<double> out;
    for (int q = bank.q_min; q <= bank.q_max; ++q) {
        for (std::size_t c = 0; c < f.comps.size(); ++c) {
            detail::for_each_mode(
                n, f.lx, f.ly, f.lz,
                [&](std::size_t k, double xi2, double, double, double, double) {
                    double s = std::sqrt(xi2);
                    double m = (q == -1) ? bank.chi(s) : bank.phi(q, s);
                    work[k] = spectra[c][k] * m;
                });
            fft::box_inverse(n, work.data(), blk.comps[c].data());
            for (double& v : blk.comps[c]) v *= scale;
        }
        out.push_back(box_lp_norm(blk, p));
    }
    return out;
}

namespace detail {

inline double lr_reduce(const std::vector<double>& terms, int r) {
    if (r != 1 && r != 2 && r != kLinf)
        throw Error("besov: unsupported summation exponent " + std::to_string(r));
    double acc = 0.0;
    for (double a : terms) {
        if (r == 1) acc += a;
        else if (r == 2) acc += a * a;
        else acc = std::max(acc, a);
    }
    return r == 2 ? std::sqrt(acc) : acc;
}

}  // namespace detail

// Nonhomogeneous Besov norm: l^r over q of 2^{qs} ||Delta_q f||_{L^p}.
inline double besov_norm(const DyadicDecomposition& d, double s, int p, int r) {
    std::vector<double> terms;
    for (int q = d.bank.q_min; q <= d.bank.q_max; ++q)
        terms.push_back(std::pow(2.0, q * s) * box_lp_norm(d.block(q), p));
    return detail::lr_reduce(terms, r);
}

inline double besov_norm(const CartesianField3D& f, const DyadicFilterBank& bank, double s,
                         int p, int r) {
    std::vector<double> norms = block_lp_norms(f, bank, p);
    std::vector<double> terms;
    for (std::size_t k = 0; k < norms.size(); ++k)
        terms.push_back(std::pow(2.0, (bank.q_min + int(k)) * s) * norms[k]);
    return detail::lr_reduce(terms, r);
}

// Homogeneous counterpart: shells only, extended downward until every
// nonzero lattice frequency is covered; the zero mode (mean) is excluded.
inline double besov_norm_homogeneous(const CartesianField3D& f, const DyadicFilterBank& bank,
                                     double s, int p, int r) {
    detail::require_bank_match(f, bank, "besov_norm_homogeneous");
    double ximin = 2.0 * M_PI / std::max({f.lx, f.ly, f.lz});
    int qlow = 0;
    while (std::ldexp(0.75, qlow) > ximin) --qlow;  // phi_qlow support reaches ximin
    --qlow;                                         // margin shell below

    const int n = f.n;
    const std::size_t nsp = std::size_t(n) * n * (n / 2 + 1);
    const double scale = 1.0 / double(f.points());
    std::vector<std::vector<std::complex<double>>> spectra(f.comps.size());
    {
        std::vector<double> re(f.points());
        for (std::size_t c = 0; c < f.comps.size(); ++c) {
            spectra[c].resize(nsp);
            re = f.comps[c];
            fft::box_forward(n, re.data(), spectra[c].data());
        }
    }
    CartesianField3D blk = CartesianField3D::zeros(n, f.lx, f.ly, f.lz, f.tag);
    std::vector<std::complex<double>> work(nsp);
    std::vector<double> terms;
    for (int q = qlow; q <= bank.q_max; ++q) {
        for (std::size_t c = 0; c < f.comps.size(); ++c) {
            detail::for_each_mode(n, f.lx, f.ly, f.lz,
                                  [&](std::size_t k, double xi2, double, double, double, double) {
                                      work[k] = spectra[c][k] * bank.phi(q, std::sqrt(xi2));
                                  });
            fft::box_inverse(n, work.data(), blk.comps[c].data());
            for (double& v : blk.comps[c]) v *= scale;
        }
        terms.push_back(std::pow(2.0, q * s) * box_lp_norm(blk, p));
    }
    return detail::lr_reduce(terms, r);
}

// Chemin-Lerner norm from a time series of per-block L^p norms: the time
// integral (L^lambda via trapezoid, lambda in {1, 2, kLinf}) goes inside
// the l^r sum over blocks.  Times must be increasing; series entries are
// block_lp_norms outputs.
inline double chemin_lerner_norm(const std::vector<double>& times,
                                 const std::vector<std::vector<double>>& series, double s,
                                 int r, int lambda, double t_end) {
    if (times.empty() || times.size() != series.size())
        throw Error("chemin_lerner_norm: empty or mismatched time series");
    if (lambda != 1 && lambda != 2 && lambda != kLinf)
        throw Error("chemin_lerner_norm: unsupported time exponent " + std::to_string(lambda));
    const std::size_t nq = series.front().size();
    std::vector<double> terms(nq, 0.0);
    for (std::size_t q = 0; q < nq; ++q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (series[i].size() != nq)
                throw Error("chemin_lerner_norm: ragged block-norm series");
            double y = series[i][q];
            if (lambda == kLinf) {
                if (times[i] <= t_end) acc = std::max(acc, y);
                continue;
            }
            if (i == 0) continue;
            if (times[i - 1] >= t_end) break;
            double t0 = times[i - 1], t1 = std::min(times[i], t_end);
            double y0 = series[i - 1][q], y1 = y;
            if (lambda == 2) { y0 *= y0; y1 *= y1; }
            acc += 0.5 * (y0 + y1) * (t1 - t0);
        }
        terms[q] = (lambda == 2) ? std::sqrt(acc) : acc;
    }
    std::vector<double> scaled(nq);
    for (std::size_t q = 0; q < nq; ++q)
        scaled[q] = std::pow(2.0, (-1 + int(q)) * s) * terms[q];
    return detail::lr_reduce(scaled, r);
}

// --- spectral operators --------------------------------------------------------

// |xi|^s multiplier; the zero mode maps to zero for s != 0 (for s < 0 this
// projects out the mean rather than dividing by zero).
inline CartesianField3D fractional_laplacian(const CartesianField3D& f, double s) {
    if (s == 0.0) return f;
    return spectral_filter(f, [s](double xi2) {
        return xi2 == 0.0 ? 0.0 : std::pow(xi2, 0.5 * s);
    });
}

// Heat propagator e^{t Delta}: multiplier exp(-t |xi|^2), t >= 0.
inline CartesianField3D heat_propagate(const CartesianField3D& f, double t) {
    if (t < 0.0) throw Error("heat_propagate: negative time");
    if (t == 0.0) return f;
    return spectral_filter(f, [t](double xi2) { return std::exp(-t * xi2); });
}

// Spectral curl of a 3-component field.  Nyquist rows are zeroed: they
// carry no faithful odd derivative.  Toroidal and meridian characters swap
// under the curl, so the tag flips.
inline CartesianField3D spectral_curl(const CartesianField3D& f) {
    if (f.comps.size() != 3) throw Error("spectral_curl: needs a 3-component field");
    const int n = f.n;
    CartesianField3D out = CartesianField3D::zeros(
        n, f.lx, f.ly, f.lz,
        f.tag == ComponentTag::ThetaVector ? ComponentTag::MeridianVector
                                           : ComponentTag::ThetaVector);
    const std::size_t nsp = std::size_t(n) * n * (n / 2 + 1);
    std::vector<std::vector<std::complex<double>>> sp(3);
    {
        std::vector<double> re(f.points());
        for (int c = 0; c < 3; ++c) {
            sp[c].resize(nsp);
            re = f.comps[c];
            fft::box_forward(n, re.data(), sp[c].data());
        }
    }
    const double limx = M_PI * n / f.lx, limy = M_PI * n / f.ly, limz = M_PI * n / f.lz;
    const double scale = 1.0 / double(f.points());
    std::vector<std::complex<double>> work(nsp);
    for (int c = 0; c < 3; ++c) {
        detail::for_each_mode(
            n, f.lx, f.ly, f.lz,
            [&](std::size_t k, double, double xx, double xy, double xz, double) {
                if (std::abs(std::abs(xx) - limx) < 1e-12 * limx) xx = 0.0;
                if (std::abs(std::abs(xy) - limy) < 1e-12 * limy) xy = 0.0;
                if (std::abs(std::abs(xz) - limz) < 1e-12 * limz) xz = 0.0;
                std::complex<double> i(0.0, 1.0);
                if (c == 0) work[k] = i * (xy * sp[2][k] - xz * sp[1][k]);
                else if (c == 1) work[k] = i * (xz * sp[0][k] - xx * sp[2][k]);
                else work[k] = i * (xx * sp[1][k] - xy * sp[0][k]);
            });
        fft::box_inverse(n, work.data(), out.comps[c].data());
        for (double& v : out.comps[c]) v *= scale;
    }
    return out;
}

// Pointwise cross product a x b of two 3-component fields on one box.
inline CartesianField3D cross_product(const CartesianField3D& a, const CartesianField3D& b) {
    if (a.comps.size() != 3 || b.comps.size() != 3)
        throw Error("cross_product: needs 3-component fields");
    if (a.n != b.n || a.lx != b.lx || a.ly != b.ly || a.lz != b.lz)
        throw SizingError("cross_product: box shapes differ");
    CartesianField3D out = CartesianField3D::zeros(
        a.n, a.lx, a.ly, a.lz,
        a.tag == b.tag ? ComponentTag::ThetaVector : ComponentTag::MeridianVector);
    for (std::size_t k = 0; k < a.points(); ++k) {
        out.comps[0][k] = a.comps[1][k] * b.comps[2][k] - a.comps[2][k] * b.comps[1][k];
        out.comps[1][k] = a.comps[2][k] * b.comps[0][k] - a.comps[0][k] * b.comps[2][k];
        out.comps[2][k] = a.comps[0][k] * b.comps[1][k] - a.comps[1][k] * b.comps[0][k];
    }
    return out;
}

// --- Bernstein ratios -----------------------------------------------------------

struct BernsteinReport {
    int q = 0;
    double r1 = 0;         // ||grad block||_a / (2^q ||block||_a)
    double r2 = 0;         // ||block||_b / (2^{3q(1/a-1/b)} ||block||_a)
    double norm_a = 0, norm_b = 0, grad_norm_a = 0;
};

namespace detail {

// Real-space gradient magnitude norm via spectral derivatives; Nyquist
// rows are zeroed (they carry no faithful odd derivative).
inline double grad_lp_box(const CartesianField3D& f, int p) {
    const int n = f.n;
    const std::size_t nsp = std::size_t(n) * n * (n / 2 + 1);
    const double scale = 1.0 / double(f.points());
    std::vector<std::complex<double>> sp(nsp), work(nsp);
    std::vector<double> re(f.points());
    // nine (or three) derivative fields reduced to a pointwise Frobenius norm
    std::vector<double> frob(f.points(), 0.0);
    for (const auto& comp : f.comps) {
        re = comp;
        fft::box_forward(n, re.data(), sp.data());
        for (int axis = 0; axis < 3; ++axis) {
            detail::for_each_mode(
                n, f.lx, f.ly, f.lz,
                [&](std::size_t k, double, double xx, double xy, double xz, double) {
                    double xi = axis == 0 ? xx : (axis == 1 ? xy : xz);
                    // Nyquist: |xi| equals the grid limit on that axis
                    double lim = axis == 0 ? M_PI * n / f.lx
                                           : (axis == 1 ? M_PI * n / f.ly : M_PI * n / f.lz);
                    bool nyq = std::abs(std::abs(xi) - lim) < 1e-12 * lim;
                    work[k] = nyq ? std::complex<double>(0.0)
                                  : sp[k] * std::complex<double>(0.0, xi);
                });
            fft::box_inverse(n, work.data(), re.data());
            for (std::size_t k = 0; k < frob.size(); ++k) {
                double d = re[k] * scale;
                frob[k] += d * d;
            }
        }
    }
    if (p == kLinf) {
        double mx = 0.0;
        for (double v : frob) mx = std::max(mx, v);
        return std::sqrt(mx);
    }
    double acc = 0.0;
    for (double v : frob) {
        double t = v;              // |grad|^2
        if (p >= 4) t *= t;
        if (p == 6) t *= v;
        acc += t;
    }
    double dv = f.volume() / double(f.points());
    return std::pow(acc * dv, 1.0 / p);
}

}  // namespace detail

// Bernstein ratios of one block: a, b in {2, 4, 6, kLinf}, b >= a in the
// embedding sense.  The block must be nonzero.  For a = 2 the gradient
// norm is evaluated by Plancherel, making the support bracket
// [3/4, 8/3] exact for shell blocks (q >= 0).
inline BernsteinReport bernstein_report(const DyadicDecomposition& d, int q, int a, int b) {
    const CartesianField3D& blk = d.block(q);
    BernsteinReport rep;
    rep.q = q;
    rep.norm_a = box_lp_norm(blk, a);
    if (rep.norm_a == 0.0)
        throw Error("bernstein_report: block q=" + std::to_string(q) + " is identically zero");
    rep.norm_b = box_lp_norm(blk, b);
    rep.grad_norm_a = (a == 2) ? grad_l2_box(blk) : detail::grad_lp_box(blk, a);
    double twoq = std::ldexp(1.0, q);
    rep.r1 = rep.grad_norm_a / (twoq * rep.norm_a);
    double ia = (a == kLinf) ? 0.0 : 1.0 / a;
    double ib = (b == kLinf) ? 0.0 : 1.0 / b;
    rep.r2 = rep.norm_b / (std::pow(2.0, 3.0 * q * (ia - ib)) * rep.norm_a);
    return rep;
}

}  // namespace axmhd
