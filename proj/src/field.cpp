#include "euler/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "euler/fft3.hpp"
#include "euler/rng.hpp"

namespace euler {

// ---- container arithmetic ---------------------------------------------------

SpectralVelocity& SpectralVelocity::operator+=(const SpectralVelocity& o) {
    for (int d = 0; d < 3; ++d)
        for (size_t i = 0; i < c[d].size(); ++i) c[d][i] += o.c[d][i];
    return *this;
}
SpectralVelocity& SpectralVelocity::operator-=(const SpectralVelocity& o) {
    for (int d = 0; d < 3; ++d)
        for (size_t i = 0; i < c[d].size(); ++i) c[d][i] -= o.c[d][i];
    return *this;
}
SpectralVelocity& SpectralVelocity::operator*=(double s) {
    for (int d = 0; d < 3; ++d)
        for (auto& z : c[d]) z *= s;
    return *this;
}
StressGrid& StressGrid::operator+=(const StressGrid& o) {
    for (int d = 0; d < 6; ++d)
        for (size_t i = 0; i < m[d].size(); ++i) m[d][i] += o.m[d][i];
    return *this;
}
StressGrid& StressGrid::operator-=(const StressGrid& o) {
    for (int d = 0; d < 6; ++d)
        for (size_t i = 0; i < m[d].size(); ++i) m[d][i] -= o.m[d][i];
    return *this;
}
StressGrid& StressGrid::operator*=(double s) {
    for (int d = 0; d < 6; ++d)
        for (auto& x : m[d]) x *= s;
    return *this;
}

// ---- symmetric 3x3 eigenvalues ----------------------------------------------

std::array<double, 3> sym3_eigenvalues(const std::array<double, 6>& a) {
    const double axx = a[0], axy = a[1], axz = a[2], ayy = a[3], ayz = a[4], azz = a[5];
    const double p1 = axy * axy + axz * axz + ayz * ayz;
    if (p1 == 0.0) {
        std::array<double, 3> e = {axx, ayy, azz};
        std::sort(e.begin(), e.end());
        return e;
    }
    const double q = (axx + ayy + azz) / 3.0;
    const double p2 = (axx - q) * (axx - q) + (ayy - q) * (ayy - q) + (azz - q) * (azz - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    // B = (A - q I)/p
    const double bxx = (axx - q) / p, byy = (ayy - q) / p, bzz = (azz - q) / p;
    const double bxy = axy / p, bxz = axz / p, byz = ayz / p;
    double detB = bxx * (byy * bzz - byz * byz) - bxy * (bxy * bzz - byz * bxz) +
                  bxz * (bxy * byz - byy * bxz);
    double r = std::clamp(detB / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + kTwoPi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    std::array<double, 3> e = {e3, e2, e1};
    std::sort(e.begin(), e.end());
    return e;
}
double sym3_lambda_max(const std::array<double, 6>& a) { return sym3_eigenvalues(a)[2]; }
double sym3_lambda_min(const std::array<double, 6>& a) { return sym3_eigenvalues(a)[0]; }

// ---- transforms ---------------------------------------------------------------

namespace {

void zero_nyquist(const WaveLattice& lat, std::vector<cplx>& a) {
    const int N = lat.N;
    const int ny = N / 2;  // axis index of wavenumber -N/2
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy)
            for (int iz = 0; iz < N; ++iz)
                if (ix == ny || iy == ny || iz == ny) a[lat.flat(ix, iy, iz)] = 0.0;
}

}  // namespace

VectorGrid to_physical(const SpectralVelocity& u) {
    VectorGrid g(u.lat);
    const long n = u.lat.size();
    for (int d = 0; d < 3; ++d) {
        std::vector<cplx> buf = u.c[d];
        idft3(buf, u.lat.N);
        for (long i = 0; i < n; ++i) g.v[d][i] = buf[i].real() * kBasisNorm;
    }
    return g;
}

SpectralVelocity from_physical(const VectorGrid& g) {
    SpectralVelocity u(g.lat);
    const long n = g.lat.size();
    const double scale = 1.0 / (kBasisNorm * double(n));
    for (int d = 0; d < 3; ++d) {
        std::vector<cplx> buf(n);
        for (long i = 0; i < n; ++i) buf[i] = g.v[d][i];
        dft3(buf, g.lat.N);
        for (long i = 0; i < n; ++i) u.c[d][i] = buf[i] * scale;
        zero_nyquist(u.lat, u.c[d]);
    }
    return u;
}

StressGrid to_physical(const SpectralStress& r) {
    StressGrid g(r.lat);
    const long n = r.lat.size();
    for (int d = 0; d < 6; ++d) {
        std::vector<cplx> buf = r.c[d];
        idft3(buf, r.lat.N);
        for (long i = 0; i < n; ++i) g.m[d][i] = buf[i].real() * kBasisNorm;
    }
    return g;
}

SpectralStress to_spectral(const StressGrid& g) {
    SpectralStress r(g.lat);
    const long n = g.lat.size();
    const double scale = 1.0 / (kBasisNorm * double(n));
    for (int d = 0; d < 6; ++d) {
        std::vector<cplx> buf(n);
        for (long i = 0; i < n; ++i) buf[i] = g.m[d][i];
        dft3(buf, g.lat.N);
        for (long i = 0; i < n; ++i) r.c[d][i] = buf[i] * scale;
        zero_nyquist(r.lat, r.c[d]);
    }
    return r;
}

// ---- core operations -----------------------------------------------------------

void leray_project(SpectralVelocity& u) {
    const long n = u.lat.size();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        auto k = u.lat.wavevector(i);
        const double k2 = WaveLattice::k_sq(k);
        if (k2 == 0.0) continue;
        const cplx kdotu = double(k[0]) * u.c[0][i] + double(k[1]) * u.c[1][i] +
                           double(k[2]) * u.c[2][i];
        const cplx f = kdotu / k2;
        u.c[0][i] -= f * double(k[0]);
        u.c[1][i] -= f * double(k[1]);
        u.c[2][i] -= f * double(k[2]);
    }
}

void galerkin_project(SpectralVelocity& u, int n) {
    if (n < 1) throw std::invalid_argument("galerkin_project: n >= 1 required");
    const long sz = u.lat.size();
    for (long i = 0; i < sz; ++i) {
        auto k = u.lat.wavevector(i);
        if (std::abs(k[0]) > n || std::abs(k[1]) > n || std::abs(k[2]) > n)
            for (int d = 0; d < 3; ++d) u.c[d][i] = 0.0;
    }
}

void dealias(SpectralVelocity& u) {
    const long sz = u.lat.size();
    for (long i = 0; i < sz; ++i) {
        auto k = u.lat.wavevector(i);
        if (!u.lat.dealias_keep(k[0], k[1], k[2]))
            for (int d = 0; d < 3; ++d) u.c[d][i] = 0.0;
    }
}

double sobolev_norm(const SpectralVelocity& u, double s) {
    const long n = u.lat.size();
    double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (long i = 0; i < n; ++i) {
        auto k = u.lat.wavevector(i);
        const double w = std::pow(1.0 + WaveLattice::k_sq(k), s);
        acc += w * (std::norm(u.c[0][i]) + std::norm(u.c[1][i]) + std::norm(u.c[2][i]));
    }
    return std::sqrt(acc);
}

double grad_norm_sq(const SpectralVelocity& u) {
    const long n = u.lat.size();
    double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (long i = 0; i < n; ++i) {
        const double k2 = WaveLattice::k_sq(u.lat.wavevector(i));
        acc += k2 * (std::norm(u.c[0][i]) + std::norm(u.c[1][i]) + std::norm(u.c[2][i]));
    }
    return acc;
}

double inner_product(const SpectralVelocity& a, const SpectralVelocity& b) {
    const long n = a.lat.size();
    double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (long i = 0; i < n; ++i)
        for (int d = 0; d < 3; ++d)
            acc += a.c[d][i].real() * b.c[d][i].real() + a.c[d][i].imag() * b.c[d][i].imag();
    return acc;
}

double sup_norm(const SpectralVelocity& u) {
    VectorGrid g = to_physical(u);
    double m = 0.0;
    const long n = u.lat.size();
    for (long i = 0; i < n; ++i) {
        const double s = g.v[0][i] * g.v[0][i] + g.v[1][i] * g.v[1][i] + g.v[2][i] * g.v[2][i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

double relative_divergence(const SpectralVelocity& u) {
    const long n = u.lat.size();
    double div_max = 0.0, scale = 0.0;
    for (long i = 0; i < n; ++i) {
        auto k = u.lat.wavevector(i);
        const cplx kd = double(k[0]) * u.c[0][i] + double(k[1]) * u.c[1][i] +
                        double(k[2]) * u.c[2][i];
        div_max = std::max(div_max, std::abs(kd));
        const double kn = std::sqrt(WaveLattice::k_sq(k));
        const double un = std::sqrt(std::norm(u.c[0][i]) + std::norm(u.c[1][i]) +
                                    std::norm(u.c[2][i]));
        scale = std::max(scale, kn * un);
    }
    return div_max / std::max(1.0, scale);
}

double hermitian_defect(const SpectralVelocity& u) {
    const int N = u.lat.N;
    double m = 0.0;
    for (int kx = -N / 2 + 1; kx < N / 2; ++kx)
        for (int ky = -N / 2 + 1; ky < N / 2; ++ky)
            for (int kz = -N / 2 + 1; kz < N / 2; ++kz) {
                const long ip = u.lat.flat_k(kx, ky, kz);
                const long im = u.lat.flat_k(-kx, -ky, -kz);
                for (int d = 0; d < 3; ++d)
                    m = std::max(m, std::abs(u.c[d][im] - std::conj(u.c[d][ip])));
            }
    return m;
}

StressGrid nonlinear_stress(const SpectralVelocity& u) {
    SpectralVelocity ud = u;
    dealias(ud);
    VectorGrid g = to_physical(ud);
    StressGrid r(u.lat);
    const long n = u.lat.size();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
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

double trace_integral(const StressGrid& r) {
    const long n = r.lat.size();
    double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (long i = 0; i < n; ++i) acc += r.m[0][i] + r.m[3][i] + r.m[5][i];
    return acc / double(n) * kTorusVolume;
}

SpectralVelocity divergence_of_stress(const SpectralStress& r) {
    SpectralVelocity out(r.lat);
    const long n = r.lat.size();
    // row i of the symmetric matrix, component order xx,xy,xz,yy,yz,zz
    static const int row[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        auto k = r.lat.wavevector(i);
        for (int d = 0; d < 3; ++d) {
            cplx s = double(k[0]) * r.c[row[d][0]][i] + double(k[1]) * r.c[row[d][1]][i] +
                     double(k[2]) * r.c[row[d][2]][i];
            out.c[d][i] = cplx(0.0, 1.0) * s;
        }
    }
    return out;
}

SpectralVelocity divergence_of_stress(const StressGrid& r) {
    return divergence_of_stress(to_spectral(r));
}

SpectralStress inverse_divergence_sym(const SpectralVelocity& g) {
    SpectralStress out(g.lat);
    const long n = g.lat.size();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        auto kv = g.lat.wavevector(i);
        const double k2 = WaveLattice::k_sq(kv);
        if (k2 == 0.0) continue;  // mean part has no anti-divergence; input must be mean-free
        const cplx gx = g.c[0][i], gy = g.c[1][i], gz = g.c[2][i];
        const double kx = kv[0], ky = kv[1], kz = kv[2];
        const cplx kdotg = kx * gx + ky * gy + kz * gz;
        // V = a (k (x) g + g (x) k) + b (k.g) k (x) k + c (k.g) I  with
        // a = -i/|k|^2, b = i/(2|k|^4), c = i/(2|k|^2):
        // then div(V e^{ikx}) = g e^{ikx}, V symmetric and traceless.
        const cplx a = cplx(0.0, -1.0) / k2;
        const cplx b = cplx(0.0, 0.5) / (k2 * k2);
        const cplx c = cplx(0.0, 0.5) / k2;
        auto entry = [&](double ki, cplx gi, double kj, cplx gj, bool diag) {
            cplx v = a * (ki * gj + kj * gi) + b * kdotg * (ki * kj);
            if (diag) v += c * kdotg;
            return v;
        };
        out.c[0][i] = entry(kx, gx, kx, gx, true);
        out.c[1][i] = entry(kx, gx, ky, gy, false);
        out.c[2][i] = entry(kx, gx, kz, gz, false);
        out.c[3][i] = entry(ky, gy, ky, gy, true);
        out.c[4][i] = entry(ky, gy, kz, gz, false);
        out.c[5][i] = entry(kz, gz, kz, gz, true);
    }
    return out;
}

double min_eigenvalue(const StressGrid& r) {
    const long n = r.lat.size();
    double m = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : m) schedule(static)
    for (long i = 0; i < n; ++i) {
        std::array<double, 6> a = {r.m[0][i], r.m[1][i], r.m[2][i],
                                   r.m[3][i], r.m[4][i], r.m[5][i]};
        m = std::min(m, sym3_lambda_min(a));
    }
    return m;
}

// ---- random fields --------------------------------------------------------------

SpectralVelocity random_velocity(const WaveLattice& lat, uint64_t seed, double decay,
                                 bool divergence_free) {
    SpectralVelocity u(lat);
    const int N = lat.N;
    for (int kx = -N / 2 + 1; kx < N / 2; ++kx)
        for (int ky = -N / 2 + 1; ky < N / 2; ++ky)
            for (int kz = -N / 2 + 1; kz < N / 2; ++kz) {
                // fill each Hermitian pair once: skip k = 0 and lexicographically
                // negative wavevectors
                if (std::tuple(kx, ky, kz) <= std::tuple(0, 0, 0)) continue;
                const long ip = lat.flat_k(kx, ky, kz);
                const long im = lat.flat_k(-kx, -ky, -kz);
                const double amp =
                    std::pow(1.0 + double(kx * kx + ky * ky + kz * kz), -decay / 2.0);
                for (int d = 0; d < 3; ++d) {
                    NormalPair np = normal_pair(seed, uint64_t(ip), 0, uint64_t(d));
                    const cplx z(amp * np.z0, amp * np.z1);
                    u.c[d][ip] = z;
                    u.c[d][im] = std::conj(z);
                }
            }
    if (divergence_free) leray_project(u);
    return u;
}

// ---- serialization ----------------------------------------------------------------

namespace {

static_assert(sizeof(double) == 8, "binary format requires 8-byte double");

constexpr char kMagic[4] = {'E', 'U', 'L', 'B'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}
uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}
void put_f64(std::ostream& os, double v) {
    uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}
double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

template <size_t NC>
void write_cubes(std::ostream& os, const WaveLattice& lat,
                 const std::array<std::vector<cplx>, NC>& c, uint32_t kind) {
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, uint32_t(lat.N));
    put_u32(os, kind);
    put_u32(os, 0);  // flags
    const int N = lat.N;
    for (int kx = -N / 2; kx < N / 2; ++kx)
        for (int ky = -N / 2; ky < N / 2; ++ky)
            for (int kz = -N / 2; kz < N / 2; ++kz) {
                const long i = lat.flat_k(kx, ky, kz);
                for (size_t d = 0; d < NC; ++d) {
                    put_f64(os, c[d][i].real());
                    put_f64(os, c[d][i].imag());
                }
            }
    if (!os) throw std::runtime_error("write_field: stream failure");
}

template <size_t NC>
WaveLattice read_cubes(std::istream& is, std::array<std::vector<cplx>, NC>& c,
                       uint32_t expect_kind) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("read_field: bad magic");
    const uint32_t version = get_u32(is);
    const uint32_t N = get_u32(is);
    const uint32_t kind = get_u32(is);
    get_u32(is);  // flags
    if (version != kVersion) throw std::runtime_error("read_field: unsupported version");
    if (kind != expect_kind) throw std::runtime_error("read_field: wrong field kind");
    WaveLattice lat{int(N)};
    if (lat.N < 4 || lat.N % 2 != 0) throw std::runtime_error("read_field: bad lattice size");
    for (auto& v : c) v.assign(lat.size(), cplx(0.0, 0.0));
    const int n = int(N);
    for (int kx = -n / 2; kx < n / 2; ++kx)
        for (int ky = -n / 2; ky < n / 2; ++ky)
            for (int kz = -n / 2; kz < n / 2; ++kz) {
                const long i = lat.flat_k(kx, ky, kz);
                for (size_t d = 0; d < NC; ++d) {
                    const double re = get_f64(is);
                    const double im = get_f64(is);
                    c[d][i] = cplx(re, im);
                }
            }
    if (!is) throw std::runtime_error("read_field: truncated record");
    return lat;
}

}  // namespace

void write_field(std::ostream& os, const SpectralVelocity& u) {
    write_cubes<3>(os, u.lat, u.c, kFieldKindVelocity);
}
void write_field(std::ostream& os, const SpectralStress& r) {
    write_cubes<6>(os, r.lat, r.c, kFieldKindStress);
}
SpectralVelocity read_velocity(std::istream& is) {
    SpectralVelocity u;
    u.lat = read_cubes<3>(is, u.c, kFieldKindVelocity);
    return u;
}
SpectralStress read_stress(std::istream& is) {
    SpectralStress r;
    r.lat = read_cubes<6>(is, r.c, kFieldKindStress);
    return r;
}

void save_field(const std::string& path, const SpectralVelocity& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_field: cannot open " + path);
    write_field(os, u);
}
void save_field(const std::string& path, const SpectralStress& r) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_field: cannot open " + path);
    write_field(os, r);
}
SpectralVelocity load_velocity(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_velocity: cannot open " + path);
    return read_velocity(is);
}
SpectralStress load_stress(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_stress: cannot open " + path);
    return read_stress(is);
}

}  // namespace euler
