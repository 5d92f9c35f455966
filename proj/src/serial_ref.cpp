#include "euler/serial_ref.hpp"

#include <cmath>

namespace euler::serial_ref {

void leray_project(SpectralVelocity& u) {
    const long n = u.lat.size();
    for (long i = 0; i < n; ++i) {
        auto k = u.lat.wavevector(i);
        const double k2 = WaveLattice::k_sq(k);
        if (k2 == 0.0) continue;
        cplx kdotu = 0.0;
        for (int d = 0; d < 3; ++d) kdotu += double(k[d]) * u.c[d][i];
        for (int d = 0; d < 3; ++d) u.c[d][i] -= kdotu / k2 * double(k[d]);
    }
}

double sobolev_norm(const SpectralVelocity& u, double s) {
    double acc = 0.0;
    const long n = u.lat.size();
    for (long i = 0; i < n; ++i) {
        auto k = u.lat.wavevector(i);
        const double w = std::pow(1.0 + WaveLattice::k_sq(k), s);
        for (int d = 0; d < 3; ++d) acc += w * std::norm(u.c[d][i]);
    }
    return std::sqrt(acc);
}

double trace_integral(const StressGrid& r) {
    double acc = 0.0;
    const long n = r.lat.size();
    for (long i = 0; i < n; ++i) acc += r.m[0][i] + r.m[3][i] + r.m[5][i];
    return acc / double(n) * kTorusVolume;
}

VectorGrid to_physical_direct(const SpectralVelocity& u) {
    const int N = u.lat.N;
    VectorGrid g(u.lat);
    for (int jx = 0; jx < N; ++jx)
        for (int jy = 0; jy < N; ++jy)
            for (int jz = 0; jz < N; ++jz) {
                cplx val[3] = {0.0, 0.0, 0.0};
                for (long i = 0; i < u.lat.size(); ++i) {
                    auto k = u.lat.wavevector(i);
                    const double phase =
                        kTwoPi / N * (double(k[0]) * jx + double(k[1]) * jy + double(k[2]) * jz);
                    const cplx e(std::cos(phase), std::sin(phase));
                    for (int d = 0; d < 3; ++d) val[d] += u.c[d][i] * e;
                }
                const long j = u.lat.flat(jx, jy, jz);
                for (int d = 0; d < 3; ++d) g.v[d][j] = val[d].real() * kBasisNorm;
            }
    return g;
}

StressGrid nonlinear_stress(const SpectralVelocity& u) {
    SpectralVelocity ud = u;
    dealias(ud);
    VectorGrid g = to_physical_direct(ud);
    StressGrid r(u.lat);
    for (long i = 0; i < u.lat.size(); ++i) {
        const double x = g.v[0][i], y = g.v[1][i], z = g.v[2][i];
        r.m[0][i] = x * x;
        r.m[1][i] = x * y;
        r.m[2][i] = x * z;
        r.m[3][i] = y * y;
        r.m[4][i] = y * z;
        r.m[5][i] = z * z;
    }
    return r;
}

}  // namespace euler::serial_ref
