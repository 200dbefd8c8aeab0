#pragma once

// The no-evolution property suite behind `check`: dyadic-analysis
// invariants, elliptic recovery, divergence and identity checks on preset
// fields.  Grid-dependent tolerances scale with h^2 so reduced resolutions
// stay meaningful; fixed tolerances are the format/partition exactness
// bounds.

#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "axmhd/config.hpp"
#include "axmhd/diagnostics.hpp"
#include "axmhd/presets.hpp"

namespace axmhd {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline CartesianField3D random_box_field(const DyadicFilterBank& bank, ComponentTag tag,
                                         std::uint64_t seed) {
    CartesianField3D f = CartesianField3D::zeros(bank.n, bank.lx, bank.ly, bank.lz, tag);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& comp : f.comps)
        for (double& v : comp) v = u(rng);
    return f;
}

inline ScalarField random_even_field(const CylGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> rad(0.0, 0.5 * g.r_max);
    std::uniform_real_distribution<double> zc(-0.5 * g.z_len, 0.5 * g.z_len);
    std::uniform_real_distribution<double> wid(g.r_max / 16.0, g.r_max / 8.0);
    struct Bump { double a, r0, z0, w; };
    std::vector<Bump> bs(5);
    for (auto& b : bs) b = {amp(rng), rad(rng), zc(rng), wid(rng)};
    const double kz = 2.0 * M_PI / g.z_len;
    return sample(g, Parity::Even, [&, bs](double r, double z) {
        double v = 0.0;
        for (const auto& b : bs) {
            double zprof = std::exp((std::cos(kz * (z - b.z0)) - 1.0) /
                                    (b.w * b.w * kz * kz * 0.5));
            v += b.a * (std::exp(-(r - b.r0) * (r - b.r0) / (b.w * b.w)) +
                        std::exp(-(r + b.r0) * (r + b.r0) / (b.w * b.w))) *
                 zprof;
        }
        return v;
    });
}

template <typename F>
CheckResult run_check(const std::string& name, F&& body) {
    CheckResult res;
    res.name = name;
    try {
        std::ostringstream detail;
        res.passed = body(detail);
        res.detail = detail.str();
    } catch (const std::exception& e) {
        res.passed = false;
        res.detail = std::string("exception: ") + e.what();
    }
    return res;
}

}  // namespace detail

inline std::vector<CheckResult> run_property_checks(const RunConfig& cfg) {
    std::vector<CheckResult> results;
    const int bn = cfg.box_n > 0 ? cfg.box_n : 64;
    const double lx = 2.0 * cfg.r_max, lz = cfg.z_len;
    const double h = std::min(cfg.r_max / cfg.nr, cfg.z_len / cfg.nz);

    auto bank_for = [&](int n) {
        DyadicFilterBank bank = make_filter_bank(n, lx, lx, lz);
        bank.corrupt = cfg.corrupt_bank;
        return bank;
    };

    results.push_back(detail::run_check("dyadic_partition_of_unity", [&](std::ostream& d) {
        DyadicFilterBank bank = bank_for(bn);
        double defect = partition_defect(bank);
        d << "defect " << defect;
        return defect <= 1e-14;
    }));

    results.push_back(detail::run_check("dyadic_reconstruction", [&](std::ostream& d) {
        DyadicFilterBank bank = bank_for(bn);
        CartesianField3D f =
            detail::random_box_field(bank, ComponentTag::Scalar, cfg.seed);
        CartesianField3D r = reconstruct(decompose(f, bank));
        double worst = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < f.comps[0].size(); ++k) {
            worst = std::max(worst, std::abs(r.comps[0][k] - f.comps[0][k]));
            scale = std::max(scale, std::abs(f.comps[0][k]));
        }
        d << "max node defect " << worst / scale;
        return worst <= 1e-12 * scale;
    }));

    results.push_back(detail::run_check("besov_l2_bracket", [&](std::ostream& d) {
        DyadicFilterBank bank = bank_for(bn);
        CartesianField3D f =
            detail::random_box_field(bank, ComponentTag::Scalar, cfg.seed + 1);
        double n2 = box_lp_norm(f, 2);
        double b = besov_norm(f, bank, 0.0, 2, 2);
        d << "besov/l2 " << b / n2;
        return b >= n2 / std::sqrt(2.0) * (1.0 - 1e-12) && b <= n2 * (1.0 + 1e-12);
    }));

    results.push_back(detail::run_check("bernstein_block_ratios", [&](std::ostream& d) {
        DyadicFilterBank bank = bank_for(bn);
        double lo = HUGE_VAL, hi = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            CartesianField3D f = detail::random_box_field(bank, ComponentTag::Scalar,
                                                          cfg.seed + 100 + trial);
            DyadicDecomposition dec = decompose(f, bank);
            for (int q = 0; q <= bank.q_max; ++q) {
                if (box_lp_norm(dec.block(q), 2) == 0.0) continue;
                BernsteinReport rep = bernstein_report(dec, q, 2, 2);
                lo = std::min(lo, rep.r1);
                hi = std::max(hi, rep.r1);
                if (rep.r1 < 0.75 || rep.r1 > 8.0 / 3.0) return false;
            }
        }
        d << "r1 range [" << lo << ", " << hi << "]";
        return true;
    }));

    results.push_back(detail::run_check("heat_block_decay", [&](std::ostream& d) {
        DyadicFilterBank bank = bank_for(bn);
        CartesianField3D f =
            detail::random_box_field(bank, ComponentTag::Scalar, cfg.seed + 2);
        DyadicDecomposition dec = decompose(f, bank);
        double worst = 0.0;
        for (int q = 0; q <= bank.q_max; ++q) {
            const CartesianField3D blk = dec.block(q);
            double n0 = box_lp_norm(blk, 2);
            if (n0 == 0.0) continue;
            for (double t : {0.01, 0.1, 1.0}) {
                double nt = box_lp_norm(heat_propagate(blk, t), 2);
                double bound =
                    std::exp(-(9.0 / 16.0) * t * std::pow(4.0, q)) * n0;
                // FFT rounding leaves ~1e-13 of the block at low frequencies
                if (nt > std::max(bound * (1.0 + 1e-10), 1e-13 * n0)) return false;
                if (bound > 1e-13 * n0) worst = std::max(worst, nt / bound);
            }
        }
        d << "worst decay/bound " << worst;
        return true;
    }));

    results.push_back(detail::run_check("stream_recovery_order", [&](std::ostream& d) {
        std::vector<double> errs;
        for (int nr : {32, 64, 128, 256}) {
            CylGrid g = make_grid(nr, 2 * nr, 4.0, 8.0);
            ScalarField om = sample(g, Parity::Odd, [](double r, double z) {
                return 2.0 * r * (5.0 - 2.0 * r * r - 2.0 * z * z) *
                       std::exp(-r * r - z * z);
            });
            ScalarField psi = solve_stream(om).psi;
            ScalarField ref = sample(g, Parity::Even, [](double r, double z) {
                return r * r * std::exp(-r * r - z * z);
            });
            errs.push_back(lp_norm(psi - ref, 2) / lp_norm(ref, 2));
        }
        bool ok = true;
        for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
            double order = std::log2(errs[i] / errs[i + 1]);
            d << (i ? ", " : "orders ") << order;
            ok = ok && order >= 1.7 && order <= 2.3;
        }
        return ok;
    }));

    results.push_back(detail::run_check("velocity_divergence", [&](std::ostream& d) {
        CylGrid g = make_grid(cfg.nr, cfg.nz, cfg.r_max, cfg.z_len);
        RunConfig ring = cfg;
        ring.preset = "ring+gauss";
        State s = initial_state(ring, g);
        FlowField f = biot_savart(omega_theta(s));
        double gu = detail::l2_combine({lp_norm(ddr(f.ur), 2), lp_norm(ddz(f.ur), 2),
                                        lp_norm(ddr(f.uz), 2), lp_norm(ddz(f.uz), 2),
                                        lp_norm(f.ur_over_r, 2)});
        double rel = lp_norm(divergence(f.ur, f.uz), 2) / gu;
        double tol = 4.0 * h * h;
        d << "rel divergence " << rel << " (tol " << tol << ")";
        return rel <= tol;
    }));

    results.push_back(detail::run_check("transport_bounds", [&](std::ostream& d) {
        CylGrid g = make_grid(cfg.nr, cfg.nz, cfg.r_max, cfg.z_len);
        ScalarField f = detail::random_even_field(g, cfg.seed + 3);
        FlowField flow =
            biot_savart(multiply_by_r(detail::random_even_field(g, cfg.seed + 4)));
        ScalarField out = advect_sl(f, flow, 0.4 * h, cfg.interp_mode());
        double lo = min_value(f), hi = max_value(f);
        d << "range [" << min_value(out) << ", " << max_value(out) << "] within ["
          << lo << ", " << hi << "]";
        return min_value(out) >= lo && max_value(out) <= hi;
    }));

    results.push_back(detail::run_check("diffusion_max_principle", [&](std::ostream& d) {
        CylGrid g = make_grid(cfg.nr, cfg.nz, cfg.r_max, cfg.z_len);
        ScalarField f = detail::random_even_field(g, cfg.seed + 5);
        ScalarField out = solve_diffusion(f, 0.1, 1.0);
        d << "|out| " << linf_norm(out) << " vs |in| " << linf_norm(f);
        return linf_norm(out) <= linf_norm(f) * (1.0 + 1e-14);
    }));

    results.push_back(detail::run_check("cz_l2_identity", [&](std::ostream& d) {
        CylGrid g = make_grid(cfg.nr, cfg.nz, cfg.r_max, cfg.z_len);
        auto gauss = [](double r, double z) { return std::exp(-r * r - z * z); };
        ScalarField ur = sample(g, Parity::Odd, [&](double r, double z) {
            return 2.0 * r * z * gauss(r, z);
        });
        ScalarField uz = sample(g, Parity::Even, [&](double r, double z) {
            return 2.0 * (1.0 - r * r) * gauss(r, z);
        });
        ScalarField om = sample(g, Parity::Odd, [&](double r, double z) {
            return 2.0 * r * (5.0 - 2.0 * r * r - 2.0 * z * z) * gauss(r, z);
        });
        double tol = std::max(cfg.cz_rel, 6.0 * h * h);
        CzReport rep = cz_check(make_flow(ur, uz), om, tol);
        double rel = std::abs(rep.l2.lhs - rep.l2.rhs) / rep.l2.rhs;
        d << "rel gap " << rel << " (tol " << tol << "), r4 " << rep.r4.value << ", r6 "
          << rep.r6.value;
        return rep.l2.satisfied && rep.r4.value > 0.0 && rep.r6.value > 0.0;
    }));

    results.push_back(detail::run_check("magnetic_identity", [&](std::ostream& d) {
        // pinned sizes: the residual floor tracks the meridian grid, and
        // 64 x 128 against a 32-box sits an order below the tolerance
        CylGrid g = make_grid(64, 128, 4.0, 8.0);
        ScalarField bth = sample(g, Parity::Odd, [](double r, double z) {
            return r * std::exp(-r * r - z * z);
        });
        MagneticIdentityReport rep = magnetic_identity_check(bth, 32);
        d << "rel " << rep.rel_l2;
        return rep.rel_l2 <= 5e-2;
    }));

    results.push_back(detail::run_check("zero_state_record", [&](std::ostream& d) {
        CylGrid g = make_grid(cfg.nr, cfg.nz, cfg.r_max, cfg.z_len);
        State s = make_state(g, ScalarField(g, Parity::Even), ScalarField(g, Parity::Even));
        DiagnosticsEngine eng;
        DiagnosticRecord r = eng.record(s, biot_savart(omega_theta(s)), 0.0);
        d << "u_L2 " << r.u_L2 << ", Pi_Linf " << r.Pi_Linf;
        return r.u_L2 == 0.0 && r.Pi_Linf == 0.0 && r.Omega_L2 == 0.0 &&
               r.grad_u_L2 == 0.0 && r.axis_term == 0.0;
    }));

    return results;
}

inline int check_command(const RunConfig& cfg, std::ostream& out) {
    int failures = 0;
    for (const CheckResult& res : run_property_checks(cfg)) {
        out << (res.passed ? "PASS" : "FAIL") << "  " << res.name;
        if (!res.detail.empty()) out << "  (" << res.detail << ")";
        out << '\n';
        if (!res.passed) ++failures;
    }
    if (failures) out << failures << " check(s) failed\n";
    return failures ? 1 : 0;
}

}  // namespace axmhd
