#pragma once

// Shared test helpers: reproducible smooth random meridian fields.
// Bumps are periodic in z (von Mises profile) and mirrored in r so the
// result has exact parity; centers and widths keep the field negligible
// at the wall.

#include <cmath>
#include <random>

#include "axmhd/grid.hpp"

namespace testutil {

inline axmhd::ScalarField random_even(const axmhd::CylGrid& g, unsigned seed, int bumps = 5) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> rad(0.0, 0.5 * g.r_max);
    std::uniform_real_distribution<double> zc(-0.5 * g.z_len, 0.5 * g.z_len);
    std::uniform_real_distribution<double> wid(g.r_max / 16.0, g.r_max / 8.0);

    struct Bump { double a, r0, z0, w; };
    std::vector<Bump> bs(bumps);
    for (auto& b : bs) b = {amp(rng), rad(rng), zc(rng), wid(rng)};

    const double kz = 2.0 * M_PI / g.z_len;
    return axmhd::sample(g, axmhd::Parity::Even, [&, bs](double r, double z) {
        double v = 0.0;
        for (const auto& b : bs) {
            double zprof = std::exp((std::cos(kz * (z - b.z0)) - 1.0) /
                                    (b.w * b.w * kz * kz * 0.5));
            double rm = std::exp(-(r - b.r0) * (r - b.r0) / (b.w * b.w));
            double rp = std::exp(-(r + b.r0) * (r + b.r0) / (b.w * b.w));
            v += b.a * (rm + rp) * zprof;
        }
        return v;
    });
}

inline axmhd::ScalarField random_odd(const axmhd::CylGrid& g, unsigned seed, int bumps = 5) {
    axmhd::ScalarField even = random_even(g, seed, bumps);
    return axmhd::multiply_by_r(even);
}

}  // namespace testutil
