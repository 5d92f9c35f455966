#pragma once
// Periodic wavenumber lattice for real vector fields on the 2*pi torus.
//
// A lattice of even edge length N carries integer wavevectors k with
// components in [-N/2, N/2-1].  The Nyquist planes (any |k_j| = N/2) are
// excluded from the retained mode set so that the set is closed under
// k -> -k; real fields are represented by Hermitian-symmetric coefficient
// cubes.  Storage is a flat cube indexed (ix*N + iy)*N + iz with the usual
// DFT wrap k = i for i < N/2, k = i - N otherwise.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace euler {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
// volume of the torus [0, 2*pi)^3
inline constexpr double kTorusVolume = kTwoPi * kTwoPi * kTwoPi;
// normalization of the orthonormal Fourier basis (2*pi)^{-3/2} e^{ik.x}
inline const double kBasisNorm = std::pow(kTwoPi, -1.5);

struct WaveLattice {
    int N = 0;

    WaveLattice() = default;
    explicit WaveLattice(int n) : N(n) {
        if (n < 4 || n % 2 != 0)
            throw std::invalid_argument("WaveLattice: N must be even and >= 4");
    }

    long size() const { return static_cast<long>(N) * N * N; }

    // axis index -> integer wavenumber
    int wavenumber(int i) const { return i < N / 2 ? i : i - N; }
    // integer wavenumber -> axis index (k in [-N/2, N/2-1])
    int axis_index(int k) const { return k >= 0 ? k : k + N; }

    long flat(int ix, int iy, int iz) const {
        return (static_cast<long>(ix) * N + iy) * N + iz;
    }
    long flat_k(int kx, int ky, int kz) const {
        return flat(axis_index(kx), axis_index(ky), axis_index(kz));
    }
    std::array<int, 3> wavevector(long idx) const {
        int iz = static_cast<int>(idx % N);
        int iy = static_cast<int>((idx / N) % N);
        int ix = static_cast<int>(idx / (static_cast<long>(N) * N));
        return {wavenumber(ix), wavenumber(iy), wavenumber(iz)};
    }

    bool is_nyquist(int kx, int ky, int kz) const {
        return kx == -N / 2 || ky == -N / 2 || kz == -N / 2;
    }
    // two-thirds dealiasing: keep |k_j| <= N/3
    bool dealias_keep(int kx, int ky, int kz) const {
        const int c = N / 3;
        return std::abs(kx) <= c && std::abs(ky) <= c && std::abs(kz) <= c;
    }
    static double k_sq(const std::array<int, 3>& k) {
        return double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
    }
};

}  // namespace euler
