#pragma once
// Divergence-free vector fields and symmetric stress fields on the torus,
// represented by Hermitian-symmetric Fourier coefficient cubes.
//
// Conventions (used consistently everywhere):
//   u(x) = (2*pi)^{-3/2} * sum_k uhat_k e^{ik.x}
// so the coefficients are taken w.r.t. the orthonormal basis and Parseval
// reads ||u||_{L2}^2 = sum_k |uhat_k|^2.  Integrals over the torus carry
// the full volume (2*pi)^3; grid quadrature is (node mean) * volume.

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "euler/lattice.hpp"

namespace euler {

using cplx = std::complex<double>;

// ---- containers ------------------------------------------------------------

struct SpectralVelocity {
    WaveLattice lat;
    std::array<std::vector<cplx>, 3> c;  // coefficient cubes per component

    SpectralVelocity() = default;
    explicit SpectralVelocity(const WaveLattice& l) : lat(l) {
        for (auto& v : c) v.assign(l.size(), cplx(0.0, 0.0));
    }
    int N() const { return lat.N; }

    SpectralVelocity& operator+=(const SpectralVelocity& o);
    SpectralVelocity& operator-=(const SpectralVelocity& o);
    SpectralVelocity& operator*=(double s);
};

// node values of a vector field (z-fastest layout, N^3 nodes)
struct VectorGrid {
    WaveLattice lat;
    std::array<std::vector<double>, 3> v;

    VectorGrid() = default;
    explicit VectorGrid(const WaveLattice& l) : lat(l) {
        for (auto& a : v) a.assign(l.size(), 0.0);
    }
};

// symmetric 3x3 matrix per node; component order xx, xy, xz, yy, yz, zz
struct StressGrid {
    WaveLattice lat;
    std::array<std::vector<double>, 6> m;

    StressGrid() = default;
    explicit StressGrid(const WaveLattice& l) : lat(l) {
        for (auto& a : m) a.assign(l.size(), 0.0);
    }
    StressGrid& operator+=(const StressGrid& o);
    StressGrid& operator-=(const StressGrid& o);
    StressGrid& operator*=(double s);
};

// spectral representation of a symmetric stress field
struct SpectralStress {
    WaveLattice lat;
    std::array<std::vector<cplx>, 6> c;

    SpectralStress() = default;
    explicit SpectralStress(const WaveLattice& l) : lat(l) {
        for (auto& v : c) v.assign(l.size(), cplx(0.0, 0.0));
    }
};

// ---- symmetric 3x3 eigenvalues ---------------------------------------------

// ascending eigenvalues of a symmetric matrix given as (xx,xy,xz,yy,yz,zz)
std::array<double, 3> sym3_eigenvalues(const std::array<double, 6>& a);
double sym3_lambda_max(const std::array<double, 6>& a);
double sym3_lambda_min(const std::array<double, 6>& a);

// ---- transforms ------------------------------------------------------------

VectorGrid to_physical(const SpectralVelocity& u);
SpectralVelocity from_physical(const VectorGrid& g);
StressGrid to_physical(const SpectralStress& r);
SpectralStress to_spectral(const StressGrid& r);

// ---- core operations -------------------------------------------------------

// Leray projection: uhat_k <- (I - k k^T/|k|^2) uhat_k, mean mode untouched
void leray_project(SpectralVelocity& u);
// Galerkin truncation: zero all modes with |k|_inf > n (n >= 1)
void galerkin_project(SpectralVelocity& u, int n);
// zero all modes outside the two-thirds dealias band
void dealias(SpectralVelocity& u);

// (sum_k (1+|k|^2)^s |uhat_k|^2)^{1/2}
double sobolev_norm(const SpectralVelocity& u, double s);
// sum_k |k|^2 |uhat_k|^2  (= ||grad u||_{L2}^2)
double grad_norm_sq(const SpectralVelocity& u);
// L2 inner product (real)
double inner_product(const SpectralVelocity& a, const SpectralVelocity& b);
// max_x |u(x)| over grid nodes
double sup_norm(const SpectralVelocity& u);
// max_k |div uhat_k| / max(1, max_k |k||uhat_k|): relative divergence
double relative_divergence(const SpectralVelocity& u);
// max_k |uhat_{-k} - conj(uhat_k)|: Hermitian-symmetry defect
double hermitian_defect(const SpectralVelocity& u);

// u (x) u evaluated in physical space after dealiasing the input
StressGrid nonlinear_stress(const SpectralVelocity& u);
// integral over the torus of tr R  (node mean * volume)
double trace_integral(const StressGrid& r);
// row-wise spectral divergence: (div R)_i = i k_j Rhat_{ij}
SpectralVelocity divergence_of_stress(const StressGrid& r);
SpectralVelocity divergence_of_stress(const SpectralStress& r);
// symmetric traceless anti-divergence: div(result) = g for mean-free g
SpectralStress inverse_divergence_sym(const SpectralVelocity& g);
// smallest eigenvalue of R(x) over all nodes
double min_eigenvalue(const StressGrid& r);

// ---- random fields (deterministic in seed) -----------------------------------

// Hermitian random velocity with coefficient decay (1+|k|^2)^{-decay/2},
// optionally Leray-projected; Nyquist planes zero
SpectralVelocity random_velocity(const WaveLattice& lat, uint64_t seed,
                                 double decay = 2.0, bool divergence_free = true);

// ---- serialization ----------------------------------------------------------
// Binary field record: magic "EULB", version, N, kind, flags (u32 LE each),
// then coefficients in lexicographic k-order (kx, then ky, then kz, each
// from -N/2 to N/2-1), components in order, little-endian f64 (re, im) pairs.

inline constexpr uint32_t kFieldKindVelocity = 1;
inline constexpr uint32_t kFieldKindStress = 2;

void write_field(std::ostream& os, const SpectralVelocity& u);
void write_field(std::ostream& os, const SpectralStress& r);
SpectralVelocity read_velocity(std::istream& is);
SpectralStress read_stress(std::istream& is);
void save_field(const std::string& path, const SpectralVelocity& u);
void save_field(const std::string& path, const SpectralStress& r);
SpectralVelocity load_velocity(const std::string& path);
SpectralStress load_stress(const std::string& path);

}  // namespace euler
