// Kernel benchmark: OpenMP spectral kernels against the straight-line serial
// reference implementations, with agreement checks.  On a single-core host
// the parallel build runs with one thread and the table reports parity.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "euler/field.hpp"
#include "euler/serial_ref.hpp"

using namespace euler;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up (FFT plans, caches)
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const char* kernel, int N, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-18s  N=%-3d  serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  max|diff| %.3e\n",
                kernel, N, serial_ms, parallel_ms, serial_ms / parallel_ms, diff);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (serial build)\n");
#endif
    for (int N : {8, 16}) {
        const WaveLattice lat(N);
        SpectralVelocity u = random_velocity(lat, 7);

        {
            SpectralVelocity a = u, b = u;
            const double ts = time_ms([&] { b = u; serial_ref::leray_project(b); }, 5);
            const double tp = time_ms([&] { a = u; leray_project(a); }, 5);
            double diff = 0.0;
            for (int d = 0; d < 3; ++d)
                for (long i = 0; i < lat.size(); ++i)
                    diff = std::max(diff, std::abs(a.c[d][i] - b.c[d][i]));
            row("leray_project", N, ts, tp, diff);
        }
        {
            double vs = 0.0, vp = 0.0;
            const double ts = time_ms([&] { vs = serial_ref::sobolev_norm(u, 1.0); }, 5);
            const double tp = time_ms([&] { vp = sobolev_norm(u, 1.0); }, 5);
            row("sobolev_norm", N, ts, tp, std::abs(vs - vp));
        }
        {
            VectorGrid gp, gs;
            const double ts = time_ms([&] { gs = serial_ref::to_physical_direct(u); }, 2);
            const double tp = time_ms([&] { gp = to_physical(u); }, 5);
            double diff = 0.0;
            for (int d = 0; d < 3; ++d)
                for (long i = 0; i < lat.size(); ++i)
                    diff = std::max(diff, std::abs(gp.v[d][i] - gs.v[d][i]));
            row("to_physical", N, ts, tp, diff);
        }
        {
            StressGrid rp, rs;
            const double ts = time_ms([&] { rs = serial_ref::nonlinear_stress(u); }, 2);
            const double tp = time_ms([&] { rp = nonlinear_stress(u); }, 5);
            double diff = 0.0;
            for (int c = 0; c < 6; ++c)
                for (long i = 0; i < lat.size(); ++i)
                    diff = std::max(diff, std::abs(rp.m[c][i] - rs.m[c][i]));
            row("nonlinear_stress", N, ts, tp, diff);
            double ds = 0.0, dp = 0.0;
            const double ts2 = time_ms([&] { ds = serial_ref::trace_integral(rs); }, 5);
            const double tp2 = time_ms([&] { dp = trace_integral(rs); }, 5);
            row("trace_integral", N, ts2, tp2, std::abs(ds - dp));
        }
    }
    return 0;
}
