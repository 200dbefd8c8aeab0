#pragma once

// Thin FFTW wrappers.  Plans are cached per shape, created under a global
// lock (the FFTW planner is not thread-safe), and built with
// FFTW_ESTIMATE | FFTW_UNALIGNED so they can be re-executed on arbitrary
// caller buffers through the new-array interface.  ESTIMATE keeps plan
// selection deterministic run to run.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace axmhd::fft {

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Batched 1-D transforms along z for meridian fields stored r-fastest:
// howmany = nr lines, element stride nr, batch distance 1.
struct ZLinePlans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

inline const ZLinePlans& zline_plans(int nr, int nz) {
    static std::map<std::pair<int, int>, ZLinePlans> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto key = std::make_pair(nr, nz);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<double> re(std::size_t(nr) * nz);
    std::vector<std::complex<double>> sp(std::size_t(nr) * (nz / 2 + 1));
    int n[1] = {nz};
    ZLinePlans p;
    p.fwd = fftw_plan_many_dft_r2c(1, n, nr,
                                   re.data(), nullptr, nr, 1,
                                   reinterpret_cast<fftw_complex*>(sp.data()), nullptr, nr, 1,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_many_dft_c2r(1, n, nr,
                                   reinterpret_cast<fftw_complex*>(sp.data()), nullptr, nr, 1,
                                   re.data(), nullptr, nr, 1,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache[key] = p;
}

// spectrum layout: sp[k * nr + i], k = 0 .. nz/2, i contiguous per mode.
inline void zline_forward(int nr, int nz, double* field, std::complex<double>* spectrum) {
    fftw_execute_dft_r2c(zline_plans(nr, nz).fwd, field,
                         reinterpret_cast<fftw_complex*>(spectrum));
}

// Unnormalized inverse (caller divides by nz); destroys the spectrum buffer.
inline void zline_inverse(int nr, int nz, std::complex<double>* spectrum, double* field) {
    fftw_execute_dft_c2r(zline_plans(nr, nz).bwd,
                         reinterpret_cast<fftw_complex*>(spectrum), field);
}

// 3-D real transforms on an n^3 box, layout idx = (ix*n + iy)*n + iz.
struct BoxPlans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

inline const BoxPlans& box_plans(int n) {
    static std::map<int, BoxPlans> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::size_t nre = std::size_t(n) * n * n;
    std::size_t nsp = std::size_t(n) * n * (n / 2 + 1);
    std::vector<double> re(nre);
    std::vector<std::complex<double>> sp(nsp);
    BoxPlans p;
    p.fwd = fftw_plan_dft_r2c_3d(n, n, n, re.data(),
                                 reinterpret_cast<fftw_complex*>(sp.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_c2r_3d(n, n, n,
                                 reinterpret_cast<fftw_complex*>(sp.data()), re.data(),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache[n] = p;
}

inline void box_forward(int n, double* field, std::complex<double>* spectrum) {
    fftw_execute_dft_r2c(box_plans(n).fwd, field,
                         reinterpret_cast<fftw_complex*>(spectrum));
}

// Unnormalized inverse (caller divides by n^3); destroys the spectrum buffer.
inline void box_inverse(int n, std::complex<double>* spectrum, double* field) {
    fftw_execute_dft_c2r(box_plans(n).bwd,
                         reinterpret_cast<fftw_complex*>(spectrum), field);
}

}  // namespace axmhd::fft
