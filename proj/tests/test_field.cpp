// Field-core unit tests.  Reference values marked "frozen" were computed
// with an independent direct-summation / finite-difference implementation
// and pasted in as constants.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "euler/field.hpp"
#include "euler/serial_ref.hpp"

using namespace euler;

namespace {

// the fixed three-mode test field shared with the external oracle
SpectralVelocity oracle_field(int N) {
    WaveLattice lat(N);
    SpectralVelocity u(lat);
    struct M { int k[3]; cplx a[3]; };
    const M modes[3] = {
        {{1, 2, 0}, {{0.30, 0.10}, {-0.20, 0.05}, {0.07, -0.40}}},
        {{0, 1, 1}, {{-0.15, 0.22}, {0.40, -0.10}, {0.05, 0.05}}},
        {{2, -1, 1}, {{0.12, -0.08}, {-0.33, 0.14}, {0.25, 0.30}}},
    };
    for (const auto& m : modes) {
        const long ip = lat.flat_k(m.k[0], m.k[1], m.k[2]);
        const long im = lat.flat_k(-m.k[0], -m.k[1], -m.k[2]);
        for (int d = 0; d < 3; ++d) {
            u.c[d][ip] = m.a[d];
            u.c[d][im] = std::conj(m.a[d]);
        }
    }
    return u;
}

double max_coeff_diff(const SpectralVelocity& a, const SpectralVelocity& b) {
    double m = 0.0;
    for (int d = 0; d < 3; ++d)
        for (size_t i = 0; i < a.c[d].size(); ++i)
            m = std::max(m, std::abs(a.c[d][i] - b.c[d][i]));
    return m;
}

}  // namespace

TEST_CASE("lattice constraints") {
    CHECK_THROWS(WaveLattice(7));
    CHECK_THROWS(WaveLattice(2));
    WaveLattice lat(8);
    CHECK(lat.wavenumber(lat.axis_index(-3)) == -3);
    CHECK(lat.is_nyquist(-4, 0, 0));
    CHECK(lat.dealias_keep(2, -2, 1));
    CHECK(!lat.dealias_keep(3, 0, 0));
}

TEST_CASE("Leray projection: idempotent, divergence-free, matches serial reference") {
    WaveLattice lat(16);
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        SpectralVelocity u = random_velocity(lat, seed, 2.0, /*divergence_free=*/false);
        SpectralVelocity ref = u;
        leray_project(u);
        CHECK(relative_divergence(u) < 1e-12);
        SpectralVelocity twice = u;
        leray_project(twice);
        CHECK(max_coeff_diff(u, twice) < 1e-13);
        serial_ref::leray_project(ref);
        CHECK(max_coeff_diff(u, ref) < 1e-14);
        CHECK(hermitian_defect(u) < 1e-13);
    }
    SpectralVelocity z(lat);
    leray_project(z);
    CHECK(sobolev_norm(z, 0.0) == 0.0);
}

TEST_CASE("Galerkin truncation") {
    WaveLattice lat(16);
    SpectralVelocity u = random_velocity(lat, 3);
    SpectralVelocity v = u;
    galerkin_project(v, 3);
    for (long i = 0; i < lat.size(); ++i) {
        auto k = lat.wavevector(i);
        bool inside = std::abs(k[0]) <= 3 && std::abs(k[1]) <= 3 && std::abs(k[2]) <= 3;
        for (int d = 0; d < 3; ++d) {
            if (inside) CHECK(v.c[d][i] == u.c[d][i]);
            else CHECK(v.c[d][i] == cplx(0.0, 0.0));
        }
    }
    SpectralVelocity w = v;
    galerkin_project(w, 3);
    CHECK(max_coeff_diff(v, w) == 0.0);
    CHECK_THROWS(galerkin_project(u, 0));
}

TEST_CASE("Sobolev norm: unit coefficient and frozen oracle values") {
    WaveLattice lat(8);
    SpectralVelocity e(lat);
    // single unit coefficient at k = (1,2,0), direction orthogonal to k
    e.c[2][lat.flat_k(1, 2, 0)] = 1.0;
    const double s = 1.3;
    CHECK(sobolev_norm(e, s) == doctest::Approx(std::pow(1.0 + 5.0, s / 2.0)).epsilon(1e-13));

    SpectralVelocity u = oracle_field(8);
    CHECK(sobolev_norm(u, 0.0) == doctest::Approx(1.3077461527376022).epsilon(1e-13));   // frozen
    CHECK(sobolev_norm(u, 1.5) == doctest::Approx(4.7717893880782105).epsilon(1e-13));   // frozen
    CHECK(serial_ref::sobolev_norm(u, 1.5) == doctest::Approx(sobolev_norm(u, 1.5)).epsilon(1e-14));
}

TEST_CASE("transforms: roundtrip and direct-summation agreement") {
    SpectralVelocity u = oracle_field(8);
    VectorGrid g = to_physical(u);
    // frozen node values from the external oracle
    WaveLattice lat = u.lat;
    CHECK(g.v[0][lat.flat(1, 2, 3)] == doctest::Approx(0.011673162938135823).epsilon(1e-12));
    CHECK(g.v[1][lat.flat(1, 2, 3)] == doctest::Approx(-0.005387613663755006).epsilon(1e-12));
    CHECK(g.v[2][lat.flat(1, 2, 3)] == doctest::Approx(-0.09158943228383494).epsilon(1e-12));
    CHECK(g.v[0][lat.flat(5, 0, 7)] == doctest::Approx(0.006285549274380827).epsilon(1e-12));
    CHECK(g.v[2][lat.flat(5, 0, 7)] == doctest::Approx(-0.037713295646285).epsilon(1e-12));

    // FFT path vs direct O(N^6) mode sum
    VectorGrid gd = serial_ref::to_physical_direct(u);
    for (int d = 0; d < 3; ++d)
        for (long i = 0; i < lat.size(); ++i)
            CHECK(g.v[d][i] == doctest::Approx(gd.v[d][i]).epsilon(1e-12));

    SpectralVelocity back = from_physical(g);
    CHECK(max_coeff_diff(u, back) < 1e-13);
}

TEST_CASE("nonlinear stress: constant field, positivity, Parseval") {
    WaveLattice lat(8);
    SpectralVelocity u(lat);
    const double a[3] = {0.4, -1.1, 0.25};
    for (int d = 0; d < 3; ++d) u.c[d][lat.flat_k(0, 0, 0)] = a[d] / kBasisNorm;
    StressGrid r = nonlinear_stress(u);
    for (long i = 0; i < lat.size(); i += 37) {
        CHECK(r.m[0][i] == doctest::Approx(a[0] * a[0]).epsilon(1e-12));
        CHECK(r.m[1][i] == doctest::Approx(a[0] * a[1]).epsilon(1e-12));
        CHECK(r.m[5][i] == doctest::Approx(a[2] * a[2]).epsilon(1e-12));
    }

    SpectralVelocity w = oracle_field(8);
    StressGrid rw = nonlinear_stress(w);
    // u (x) u is PSD by construction; the closed-form eigensolver resolves
    // the zero eigenvalues of rank-one matrices to ~1e-10 absolute
    CHECK(min_eigenvalue(rw) >= -1e-9);
    const double l2sq = sobolev_norm(w, 0.0) * sobolev_norm(w, 0.0);
    CHECK(trace_integral(rw) == doctest::Approx(l2sq).epsilon(1e-10));
    CHECK(trace_integral(rw) == doctest::Approx(1.7102).epsilon(1e-12));  // frozen
    CHECK(serial_ref::trace_integral(rw) == doctest::Approx(trace_integral(rw)).epsilon(1e-14));

    // serial direct-DFT reference for the product kernel
    StressGrid rs = serial_ref::nonlinear_stress(w);
    for (int d = 0; d < 6; ++d)
        for (long i = 0; i < lat.size(); i += 11)
            CHECK(rw.m[d][i] == doctest::Approx(rs.m[d][i]).epsilon(1e-11));
}

TEST_CASE("trace integral of the identity stress") {
    WaveLattice lat(8);
    StressGrid r(lat);
    for (long i = 0; i < lat.size(); ++i) { r.m[0][i] = r.m[3][i] = r.m[5][i] = 1.0; }
    CHECK(trace_integral(r) == doctest::Approx(3.0 * kTorusVolume).epsilon(1e-14));
    SpectralVelocity d = divergence_of_stress(r);
    CHECK(sobolev_norm(d, 0.0) < 1e-13);
}

TEST_CASE("divergence of stress vs frozen finite-difference oracle") {
    // products of the three-mode field are fully resolved on N=16
    SpectralVelocity u = oracle_field(16);
    StressGrid r = nonlinear_stress(u);
    SpectralVelocity div = divergence_of_stress(r);
    VectorGrid g = to_physical(div);
    const long node = u.lat.flat(1, 2, 3);
    // frozen: 4th-order finite differences on a 64^3 grid (truncation ~7e-6)
    CHECK(std::abs(g.v[0][node] - 0.006378224267313098) < 5e-5);
    CHECK(std::abs(g.v[1][node] - 0.002978659122232748) < 5e-5);
    CHECK(std::abs(g.v[2][node] - 0.0017973623030040414) < 5e-5);
}

TEST_CASE("symmetric anti-divergence: exact right inverse, traceless") {
    WaveLattice lat(8);
    SpectralVelocity g = random_velocity(lat, 17, 2.0, /*divergence_free=*/false);
    for (int d = 0; d < 3; ++d) g.c[d][lat.flat_k(0, 0, 0)] = 0.0;  // mean-free
    SpectralStress v = inverse_divergence_sym(g);
    SpectralVelocity back = divergence_of_stress(v);
    CHECK(max_coeff_diff(back, g) < 1e-12);
    for (long i = 0; i < lat.size(); ++i)
        CHECK(std::abs(v.c[0][i] + v.c[3][i] + v.c[5][i]) < 1e-13);
}

TEST_CASE("symmetric 3x3 eigenvalues: frozen samples") {
    auto e1 = sym3_eigenvalues({2.0, 0.0, 0.0, -1.0, 0.0, -1.0});
    CHECK(e1[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(e1[1] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(e1[2] == doctest::Approx(2.0).epsilon(1e-13));
    // frozen from a dense eigensolver
    auto e2 = sym3_eigenvalues({0.3, -0.2, 0.7, 1.1, 0.4, -0.9});
    CHECK(e2[0] == doctest::Approx(-1.305029175855988).epsilon(1e-12));
    CHECK(e2[1] == doctest::Approx(0.6215931689164038).epsilon(1e-12));
    CHECK(e2[2] == doctest::Approx(1.1834360069395842).epsilon(1e-12));
    auto e3 = sym3_eigenvalues({1e-3, 1e-9, 0.0, 1e-3, 2e-9, 1e-3});
    CHECK(e3[0] == doctest::Approx(0.0009999977639320225).epsilon(1e-9));
    CHECK(e3[2] == doctest::Approx(0.0010000022360679775).epsilon(1e-9));
}

TEST_CASE("binary serialization roundtrip") {
    SpectralVelocity u = oracle_field(8);
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    write_field(ss, u);
    SpectralVelocity v = read_velocity(ss);
    CHECK(v.lat.N == 8);
    CHECK(max_coeff_diff(u, v) == 0.0);

    SpectralStress r = to_spectral(nonlinear_stress(u));
    std::stringstream s2(std::ios::in | std::ios::out | std::ios::binary);
    write_field(s2, r);
    SpectralStress r2 = read_stress(s2);
    for (int d = 0; d < 6; ++d)
        for (long i = 0; i < u.lat.size(); ++i) CHECK(r.c[d][i] == r2.c[d][i]);

    std::stringstream bad(std::string("XXXXgarbage"), std::ios::in | std::ios::binary);
    CHECK_THROWS(read_velocity(bad));
    // kind mismatch rejected
    std::stringstream s3(std::ios::in | std::ios::out | std::ios::binary);
    write_field(s3, u);
    CHECK_THROWS(read_stress(s3));
}
