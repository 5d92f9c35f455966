#pragma once
// Additive trace-class noise on divergence-free fields.
//
// The coefficient acts diagonally in Fourier space: mode k with weight
// g_k = c_g (1+|k|^2)^{-gamma/2}, two divergence-free polarizations per k.
// Each stored (k, polarization) entry carries an independent pair of real
// Brownian motions; the sampled field is Hermitian-symmetric (real) and
// satisfies E |uhat_k(t)|^2 = g_k^2 t per mode and per polarization, and
// E ||GB(t)||_{L2}^2 = t * hs_norm(0)^2.  Increments are a pure function of
// (seed, entry, step) via the counter RNG, so paths are reproducible and
// samplable in parallel.

#include <array>
#include <cstdint>
#include <vector>

#include "euler/field.hpp"

namespace euler {

struct NoiseMode {
    std::array<int, 3> k;
    int pol;   // 0 or 1
    double g;  // spectral weight
};

struct NoiseCoefficient {
    double c_g = 0.2;
    double gamma = 4.0;
    double sigma = 0.5;  // regularity margin parameter; requires gamma > 3 + sigma/2
    int cutoff = 0;      // |k|_inf <= cutoff
    std::vector<NoiseMode> modes;

    // canonical coefficient: all k != 0 with |k|_inf <= cutoff, both
    // polarizations, both signs of k
    static NoiseCoefficient spectral(int cutoff, double c_g = 0.2, double gamma = 4.0,
                                     double sigma = 0.5);
    // a single stored entry (plus its implicit Hermitian mirror in sampling)
    static NoiseCoefficient single_mode(const std::array<int, 3>& k, int pol, double g);

    // orthonormal pair spanning the plane orthogonal to k (deterministic)
    static std::array<std::array<double, 3>, 2> polarization(const std::array<int, 3>& k);

    double hs_norm_sq(double s) const;  // sum over entries of g^2 (1+|k|^2)^s
    double hs_norm(double s) const;

    // G dB over a step of length dt, added into u (lattice must resolve cutoff)
    void add_increment(SpectralVelocity& u, uint64_t seed, uint64_t step, double dt) const;
    SpectralVelocity increment(const WaveLattice& lat, uint64_t seed, uint64_t step,
                               double dt) const;

    // ||G* e||_U^2 for a (divergence-free) field e: the quadratic variation
    // rate of t -> <GB(t), e>
    double qv_rate(const SpectralVelocity& e) const;
};

// materialized driver path: snapshots GB(t_j) on a uniform grid, GB(0) = 0
struct WienerPath {
    NoiseCoefficient noise;
    uint64_t seed = 0;
    double dt = 0.0;
    std::vector<double> t;
    std::vector<SpectralVelocity> gb;

    static WienerPath sample(const NoiseCoefficient& g, const WaveLattice& lat, uint64_t seed,
                             double dt, int steps);
    int steps() const { return int(t.size()) - 1; }
    // GB(t_{j+1}) - GB(t_j)
    SpectralVelocity increment_at(int j) const;
};

// freeze the path after time T (increments past T are zero)
WienerPath stopped_path(const WienerPath& p, double T);

}  // namespace euler
