#include "euler/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "euler/rng.hpp"

namespace euler {

NoiseCoefficient NoiseCoefficient::spectral(int cutoff, double c_g, double gamma,
                                            double sigma) {
    if (cutoff < 1) throw std::invalid_argument("noise: cutoff >= 1 required");
    if (c_g <= 0.0) throw std::invalid_argument("noise: c_g > 0 required");
    if (!(gamma > 3.0 + sigma / 2.0))
        throw std::invalid_argument("noise: regularity requires gamma > 3 + sigma/2");
    NoiseCoefficient n;
    n.c_g = c_g;
    n.gamma = gamma;
    n.sigma = sigma;
    n.cutoff = cutoff;
    for (int kx = -cutoff; kx <= cutoff; ++kx)
        for (int ky = -cutoff; ky <= cutoff; ++ky)
            for (int kz = -cutoff; kz <= cutoff; ++kz) {
                if (kx == 0 && ky == 0 && kz == 0) continue;
                const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
                const double g = c_g * std::pow(1.0 + k2, -gamma / 2.0);
                for (int pol = 0; pol < 2; ++pol)
                    n.modes.push_back({{kx, ky, kz}, pol, g});
            }
    return n;
}

NoiseCoefficient NoiseCoefficient::single_mode(const std::array<int, 3>& k, int pol,
                                               double g) {
    if (k[0] == 0 && k[1] == 0 && k[2] == 0)
        throw std::invalid_argument("noise: zero mode not allowed");
    NoiseCoefficient n;
    n.cutoff = std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
    n.modes.push_back({k, pol, g});
    return n;
}

std::array<std::array<double, 3>, 2> NoiseCoefficient::polarization(
    const std::array<int, 3>& k) {
    const double kx = k[0], ky = k[1], kz = k[2];
    const double kn = std::sqrt(kx * kx + ky * ky + kz * kz);
    // reference axis not parallel to k
    double ax = 1.0, ay = 0.0, az = 0.0;
    if (ky == 0.0 && kz == 0.0) { ax = 0.0; ay = 1.0; }
    // e1 = normalize(k x a)
    double e1x = ky * az - kz * ay, e1y = kz * ax - kx * az, e1z = kx * ay - ky * ax;
    const double n1 = std::sqrt(e1x * e1x + e1y * e1y + e1z * e1z);
    e1x /= n1; e1y /= n1; e1z /= n1;
    // e2 = normalize(k) x e1
    const double ux = kx / kn, uy = ky / kn, uz = kz / kn;
    const double e2x = uy * e1z - uz * e1y, e2y = uz * e1x - ux * e1z,
                 e2z = ux * e1y - uy * e1x;
    return {{{e1x, e1y, e1z}, {e2x, e2y, e2z}}};
}

double NoiseCoefficient::hs_norm_sq(double s) const {
    double acc = 0.0;
    for (const auto& m : modes) {
        const double k2 =
            double(m.k[0]) * m.k[0] + double(m.k[1]) * m.k[1] + double(m.k[2]) * m.k[2];
        acc += m.g * m.g * std::pow(1.0 + k2, s);
    }
    return acc;
}
double NoiseCoefficient::hs_norm(double s) const { return std::sqrt(hs_norm_sq(s)); }

void NoiseCoefficient::add_increment(SpectralVelocity& u, uint64_t seed, uint64_t step,
                                     double dt) const {
    if (u.lat.N / 2 <= cutoff)
        throw std::invalid_argument("noise: lattice does not resolve the coefficient cutoff");
    const double sdt = std::sqrt(dt);
    for (size_t j = 0; j < modes.size(); ++j) {
        const auto& m = modes[j];
        const auto pol = polarization(m.k)[m.pol];
        NormalPair np = normal_pair(seed, uint64_t(j) + 1, step);
        const cplx b(0.5 * m.g * sdt * np.z0, 0.5 * m.g * sdt * np.z1);
        const long ip = u.lat.flat_k(m.k[0], m.k[1], m.k[2]);
        const long im = u.lat.flat_k(-m.k[0], -m.k[1], -m.k[2]);
        for (int d = 0; d < 3; ++d) {
            u.c[d][ip] += b * pol[d];
            u.c[d][im] += std::conj(b) * pol[d];
        }
    }
}

SpectralVelocity NoiseCoefficient::increment(const WaveLattice& lat, uint64_t seed,
                                             uint64_t step, double dt) const {
    SpectralVelocity u(lat);
    add_increment(u, seed, step, dt);
    return u;
}

double NoiseCoefficient::qv_rate(const SpectralVelocity& e) const {
    double acc = 0.0;
    for (const auto& m : modes) {
        const auto pol = polarization(m.k)[m.pol];
        const long ip = e.lat.flat_k(m.k[0], m.k[1], m.k[2]);
        cplx proj = 0.0;
        for (int d = 0; d < 3; ++d) proj += pol[d] * e.c[d][ip];
        acc += m.g * m.g * std::norm(proj);
    }
    return acc;
}

WienerPath WienerPath::sample(const NoiseCoefficient& g, const WaveLattice& lat,
                              uint64_t seed, double dt, int steps) {
    if (dt <= 0.0 || steps < 1) throw std::invalid_argument("WienerPath: dt>0, steps>=1");
    WienerPath p;
    p.noise = g;
    p.seed = seed;
    p.dt = dt;
    p.t.resize(steps + 1);
    p.gb.reserve(steps + 1);
    p.gb.emplace_back(lat);
    for (int j = 0; j < steps; ++j) {
        SpectralVelocity next = p.gb.back();
        g.add_increment(next, seed, uint64_t(j), dt);
        p.gb.push_back(std::move(next));
    }
    for (int j = 0; j <= steps; ++j) p.t[j] = dt * j;
    return p;
}

SpectralVelocity WienerPath::increment_at(int j) const {
    SpectralVelocity d = gb[j + 1];
    d -= gb[j];
    return d;
}

WienerPath stopped_path(const WienerPath& p, double T) {
    WienerPath q = p;
    for (size_t j = 1; j < q.gb.size(); ++j)
        if (q.t[j] > T) q.gb[j] = q.gb[j - 1];
    return q;
}

}  // namespace euler
