#include "euler/convexint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "euler/fft3.hpp"
#include "euler/galerkin.hpp"

namespace euler {

namespace {

constexpr double kVol = kTorusVolume;

// ---- wave dictionary ---------------------------------------------------------

struct Ray {
    std::array<int, 3> xi;
    std::array<double, 3> a_hat;  // unit amplitude direction, orthogonal to xi
};

const std::array<Ray, 6>& dictionary() {
    static const std::array<Ray, 6> d = {{
        {{1, 0, 0}, {0.0, 1.0, 0.0}},
        {{0, 1, 0}, {0.0, 0.0, 1.0}},
        {{0, 0, 1}, {1.0, 0.0, 0.0}},
        {{1, 1, 0}, {0.0, 0.0, 1.0}},
        {{0, 1, 1}, {1.0, 0.0, 0.0}},
        {{1, 0, 1}, {0.0, 1.0, 0.0}},
    }};
    return d;
}

int ray_sup(const Ray& r) {
    return std::max({std::abs(r.xi[0]), std::abs(r.xi[1]), std::abs(r.xi[2])});
}

// ---- small spectral helpers ----------------------------------------------------

SpectralVelocity spectral_curl(const SpectralVelocity& f) {
    SpectralVelocity out(f.lat);
    const long sz = f.lat.size();
    for (long i = 0; i < sz; ++i) {
        const auto k = f.lat.wavevector(i);
        const cplx ikx(0.0, double(k[0])), iky(0.0, double(k[1])), ikz(0.0, double(k[2]));
        out.c[0][i] = iky * f.c[2][i] - ikz * f.c[1][i];
        out.c[1][i] = ikz * f.c[0][i] - ikx * f.c[2][i];
        out.c[2][i] = ikx * f.c[1][i] - iky * f.c[0][i];
    }
    return out;
}

// Gaussian spectral damping of a nonnegative scalar grid around the cutoff
// scale (no ringing, so the envelope stays close to the input where it is
// already slow), clamped at zero
void smooth_scalar(const WaveLattice& lat, std::vector<double>& s, int cutoff) {
    const long sz = lat.size();
    std::vector<cplx> buf(sz);
    for (long i = 0; i < sz; ++i) buf[i] = s[i];
    dft3(buf, lat.N);
    for (long i = 0; i < sz; ++i) {
        const auto k = lat.wavevector(i);
        if (std::abs(k[0]) > cutoff || std::abs(k[1]) > cutoff || std::abs(k[2]) > cutoff)
            buf[i] = 0.0;
    }
    idft3(buf, lat.N);
    for (long i = 0; i < sz; ++i) s[i] = std::max(0.0, buf[i].real() / double(sz));
}

StressGrid stress_from_spectral(const SpectralStress& r) { return to_physical(r); }

// one assembled wave: the exactly divergence-free field and its two flux parts
struct Wave {
    SpectralVelocity w;   // curl-built oscillation
    StressGrid flux_abs;  // divergence-free absorber (mean of w (x) w, corrected)
    StressGrid flux_dt;   // anti-divergence of w (pairs with the chi' factor)
};

Wave build_wave(const WaveLattice& lat, const std::vector<double>& amp, const Ray& ray,
                int freq, double phase) {
    const long sz = lat.size();
    const double xin = std::sqrt(double(ray.xi[0]) * ray.xi[0] +
                                 double(ray.xi[1]) * ray.xi[1] +
                                 double(ray.xi[2]) * ray.xi[2]);
    // P = -(xi_hat x A_hat) / (freq |xi|): curl of sin-potential gives amp*cos*A_hat
    std::array<double, 3> xh = {ray.xi[0] / xin, ray.xi[1] / xin, ray.xi[2] / xin};
    std::array<double, 3> P = {-(xh[1] * ray.a_hat[2] - xh[2] * ray.a_hat[1]),
                               -(xh[2] * ray.a_hat[0] - xh[0] * ray.a_hat[2]),
                               -(xh[0] * ray.a_hat[1] - xh[1] * ray.a_hat[0])};
    for (double& c : P) c /= (freq * xin);

    VectorGrid pot(lat);
    for (int ix = 0; ix < lat.N; ++ix)
        for (int iy = 0; iy < lat.N; ++iy)
            for (int iz = 0; iz < lat.N; ++iz) {
                const long i = lat.flat(ix, iy, iz);
                const double arg = kTwoPi / lat.N *
                                       (freq * (ray.xi[0] * ix + ray.xi[1] * iy +
                                                ray.xi[2] * iz)) +
                                   phase;
                const double f = amp[i] * std::sin(arg);
                for (int d = 0; d < 3; ++d) pot.v[d][i] = f * P[d];
            }
    Wave wave;
    wave.w = spectral_curl(from_physical(pot));

    // pointwise absorber: the traceless part of w (x) w, so only the
    // isotropic share |w|^2/3 of the oscillation reaches the constraint;
    // its divergence is a gradient plus slow envelope terms, and the exact
    // anti-divergence correction below stays small
    VectorGrid wg = to_physical(wave.w);
    StressGrid abs_raw(lat);
    for (long i = 0; i < sz; ++i) {
        const double wx = wg.v[0][i], wy = wg.v[1][i], wz = wg.v[2][i];
        const double third = (wx * wx + wy * wy + wz * wz) / 3.0;
        abs_raw.m[0][i] = wx * wx - third;
        abs_raw.m[1][i] = wx * wy;
        abs_raw.m[2][i] = wx * wz;
        abs_raw.m[3][i] = wy * wy - third;
        abs_raw.m[4][i] = wy * wz;
        abs_raw.m[5][i] = wz * wz - third;
    }
    // pressure-eliminated balance: only the divergence-free share of the
    // absorber's divergence needs an exact anti-divergence; gradient parts
    // are invisible to the projected transport identity
    SpectralVelocity div_abs = divergence_of_stress(abs_raw);
    leray_project(div_abs);
    div_abs *= -1.0;
    StressGrid corr = stress_from_spectral(inverse_divergence_sym(div_abs));
    abs_raw += corr;
    wave.flux_abs = std::move(abs_raw);
    wave.flux_dt = stress_from_spectral(inverse_divergence_sym(wave.w));
    return wave;
}

// minimum over nodes and times of e(t) - e(v+GB, H)
double min_margin(const Subsolution& sub) {
    double worst = std::numeric_limits<double>::infinity();
    for (int j = 0; j < sub.times(); ++j) {
        SpectralVelocity u = sub.v[j];
        u += sub.gb.gb[j];
        std::vector<double> ev = e_lambda_max_field(u, sub.H[j]);
        for (double val : ev) worst = std::min(worst, sub.e[j] - val);
    }
    return worst;
}

double sq(double x) { return x * x; }


}  // namespace

// ---- e functional -----------------------------------------------------------------

double e_lambda_max(const std::array<double, 3>& w, const std::array<double, 6>& h) {
    if (std::abs(h[0] + h[3] + h[5]) >
        1e-8 * (1.0 + std::abs(h[0]) + std::abs(h[3]) + std::abs(h[5])))
        throw std::invalid_argument("e_lambda_max: H must be traceless");
    std::array<double, 6> m = {w[0] * w[0] - h[0], w[0] * w[1] - h[1],
                               w[0] * w[2] - h[2], w[1] * w[1] - h[3],
                               w[1] * w[2] - h[4], w[2] * w[2] - h[5]};
    return 1.5 * sym3_lambda_max(m);
}

std::vector<double> e_lambda_max_field(const SpectralVelocity& u, const StressGrid& h) {
    VectorGrid g = to_physical(u);
    const long sz = u.lat.size();
    std::vector<double> out(sz);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < sz; ++i) {
        const double wx = g.v[0][i], wy = g.v[1][i], wz = g.v[2][i];
        std::array<double, 6> m = {wx * wx - h.m[0][i], wx * wy - h.m[1][i],
                                   wx * wz - h.m[2][i], wy * wy - h.m[3][i],
                                   wy * wz - h.m[4][i], wz * wz - h.m[5][i]};
        out[i] = 1.5 * sym3_lambda_max(m);
    }
    return out;
}

// ---- audits -----------------------------------------------------------------------

bool SubsolutionAudit::ok(double tol_pde, double tol_div) const {
    return max_pde_residual <= tol_pde && max_divergence <= tol_div && min_margin > 0.0;
}

SubsolutionAudit subsolution_audit(const Subsolution& sub) {
    SubsolutionAudit a;
    for (int j = 0; j + 1 < sub.times(); ++j) {
        const double h = sub.t[j + 1] - sub.t[j];
        SpectralVelocity res = sub.v[j + 1];
        res -= sub.v[j];
        res *= 1.0 / h;
        res += divergence_of_stress(sub.H[j]);
        leray_project(res);  // pressure-eliminated form: gradients drop
        a.max_pde_residual = std::max(a.max_pde_residual, sobolev_norm(res, 0.0));
    }
    for (const auto& vj : sub.v)
        a.max_divergence = std::max(a.max_divergence, relative_divergence(vj));
    for (const auto& hj : sub.H)
        for (long i = 0; i < sub.lat.size(); ++i)
            a.max_trace = std::max(a.max_trace,
                                   std::abs(hj.m[0][i] + hj.m[3][i] + hj.m[5][i]));
    a.min_margin = min_margin(sub);
    return a;
}

Subsolution base_subsolution(const WienerPath& gb_stopped, double T_L,
                             const std::vector<double>& e_density, double delta) {
    Subsolution sub;
    sub.lat = gb_stopped.gb.front().lat;
    sub.t = gb_stopped.t;
    if (e_density.size() != sub.t.size())
        throw std::invalid_argument("base_subsolution: profile/grid size mismatch");
    sub.v.assign(sub.t.size(), SpectralVelocity(sub.lat));
    sub.H.assign(sub.t.size(), StressGrid(sub.lat));
    sub.e = e_density;
    sub.gb = gb_stopped;
    sub.T_L = T_L;
    const double m = min_margin(sub);
    if (m <= delta)
        throw std::invalid_argument("base_subsolution: profile does not clear the driver");
    sub.delta = m;
    return sub;
}

// ---- admissible energy --------------------------------------------------------------

double EnergyProfile::value(double t) const {
    return e0 - C_L * (std::pow(e0, 0.5 * (1.0 + beta)) + 1.0) *
                     std::pow(std::max(t, 0.0), 0.5 - 2.0 * delta_exp);
}

EnergyProfile admissible_energy(const NoiseCoefficient& g, const WaveLattice& lat,
                                double L, double T, double dt, double delta,
                                double e0_cap) {
    if (L <= 0.0 || T <= 0.0 || dt <= 0.0 || delta <= 0.0)
        throw std::invalid_argument("admissible_energy: positive L, T, dt, delta required");
    const int steps = int(std::llround(T / dt));

    EnergyProfile prof;
    prof.margin = delta;
    double c_of_l = 1.0;     // the driver-free constant
    double sup_driver = 0.0; // sup over paths, times, nodes of (3/2)|GB_L|^2
    if (!g.modes.empty()) {
        const double s_exp = 0.5 * (3.0 + g.sigma);
        for (uint64_t seed : {101u, 102u, 103u, 104u}) {
            WienerPath p = WienerPath::sample(g, lat, seed, dt, steps);
            PathStop st = stopping_time_TL(p, L, 0.1, 0.375, 20.0);
            WienerPath q = stopped_path(p, st.time);
            for (int j = 0; j <= steps; ++j) {
                c_of_l = std::max(c_of_l, 1.0 + sobolev_norm(q.gb[j], s_exp));
                const double s = sup_norm(q.gb[j]);
                sup_driver = std::max(sup_driver, 1.5 * s * s);
            }
        }
    }
    prof.C_L = c_of_l;

    double e0 = sup_driver + 2.0 * delta + 0.1;
    while (e0 < e0_cap) {
        prof.e0 = e0;
        if (prof.value(T) > sup_driver + delta) return prof;
        e0 *= 2.0;
    }
    throw std::runtime_error(
        "admissible_energy: e0 search exceeded cap; binding constraint: profile decay vs "
        "driver sup");
}

// ---- oscillation steps ----------------------------------------------------------------

namespace {

// deficit quadratic form along a direction: A^T ((2/3) e I - (U(x)U - H)) A
std::vector<double> deficit_along(const VectorGrid& u, const StressGrid& h, double e_den,
                                  const std::array<double, 3>& a) {
    const long sz = u.lat.size();
    static const int row[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    std::vector<double> out(sz);
    for (long i = 0; i < sz; ++i) {
        const double ua = u.v[0][i] * a[0] + u.v[1][i] * a[1] + u.v[2][i] * a[2];
        double haa = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) haa += a[r] * h.m[row[r][c]][i] * a[c];
        out[i] = (2.0 / 3.0) * e_den - (ua * ua - haa);
    }
    return out;
}

struct StepPlan {
    int base_index = 0;       // adapted assignment time for amplitudes
    double chi_start = -1.0;  // < 0: chi identically 1; else ramp [start, 2*start]
};

Subsolution oscillation_core(const Subsolution& sub, const std::vector<double>& e_density,
                             int frequency, const StepOptions& opt, const StepPlan& plan) {
    if (e_density.size() != size_t(sub.times()))
        throw std::invalid_argument("oscillation step: profile/grid size mismatch");
    Subsolution work = sub;
    work.e = e_density;
    const double old_margin = min_margin(work);
    if (old_margin <= 0.0)
        throw std::invalid_argument("oscillation step: strict margin precondition violated");

    const WaveLattice& lat = sub.lat;
    const long sz = lat.size();
    const int jb = plan.base_index;

    // base state at the adapted assignment time
    SpectralVelocity ub_spec = sub.v[jb];
    ub_spec += sub.gb.gb[jb];
    VectorGrid ub = to_physical(ub_spec);

    // pointwise data of U (x) U - H at the base time: the matrix itself, its
    // largest eigenvalue, and the remaining budget below (2/3) e
    std::array<std::vector<double>, 6> m_base;
    for (auto& comp : m_base) comp.resize(sz);
    std::vector<double> lam1(sz), budget_raw(sz);
    {
        const StressGrid& hb = sub.H[jb];
        for (long i = 0; i < sz; ++i) {
            std::array<double, 6> m;
            int c6 = 0;
            for (int r = 0; r < 3; ++r)
                for (int s = r; s < 3; ++s, ++c6)
                    m[c6] = ub.v[r][i] * ub.v[s][i] - hb.m[c6][i];
            for (int c = 0; c < 6; ++c) m_base[c][i] = m[c];
            lam1[i] = sym3_lambda_max(m);
            budget_raw[i] = std::max(0.0, (2.0 / 3.0) * e_density[jb] - lam1[i]);
        }
    }


    // rank dictionary rays by the mean positive deficit along their amplitude
    // direction; prefer rays not used before, lexicographic tie-break by index
    std::vector<int> order(dictionary().size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> score(order.size());
    for (size_t r = 0; r < order.size(); ++r) {
        std::vector<double> d =
            deficit_along(ub, sub.H[jb], e_density[jb], dictionary()[r].a_hat);
        double acc = 0.0;
        for (double x : d) acc += std::max(0.0, x);
        score[r] = acc / double(sz);
    }
    auto is_used = [&](int r) {
        return std::find(sub.used_rays.begin(), sub.used_rays.end(), r) !=
               sub.used_rays.end();
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (is_used(a) != is_used(b)) return !is_used(a);
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;
    });
    const int waves = std::max(1, opt.waves);

    // chi profile on the grid (piecewise linear; slopes are exact per interval)
    std::vector<double> chi(sub.times(), 1.0);
    if (plan.chi_start >= 0.0) {
        const double a = plan.chi_start, b = 2.0 * plan.chi_start;
        for (int j = 0; j < sub.times(); ++j) {
            const double t = sub.t[j];
            chi[j] = t <= a ? 0.0 : (t >= b ? 1.0 : (t - a) / (b - a));
        }
    }

    // amplitude envelopes are kept slow relative to the oscillation so the
    // frozen-phase amplitude solve and the smallness of the anti-divergence
    // correction both hold; the solved pointwise cap is re-imposed after
    // smoothing so the model stays an upper bound
    const int smooth_cut = std::max(1, lat.N / 6);
    double scale = 1.0;
    int freq = frequency;
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
        Subsolution cand = work;
        double weak_norm = 0.0;
        std::vector<int> chosen;
        for (int wv = 0; wv < waves; ++wv) {
            const int ridx = order[wv % order.size()];
            const Ray& ray = dictionary()[ridx];
            const int cap =
                std::max(1, (lat.N / 2 - 1 - smooth_cut) / ray_sup(ray));
            const int f = std::min(freq, cap);
            // pointwise exact amplitude: with the traceless absorber the
            // frozen-phase model of the constraint matrix at amplitude value
            // s = chi a cos is  M + s (U A^T + A U^T) + (s^2/3) I,  which is
            // convex in s, so the worst case over phases and chi is s = +-a;
            // bisect for the largest a whose peak eigenvalue stays below the
            // allowed level lam1 + kappa * budget
            std::vector<double> a2(sz);
            const double kappa_s = scale * opt.kappa / waves;
            const auto& A = ray.a_hat;
#pragma omp parallel for schedule(static)
            for (long i = 0; i < sz; ++i) {
                const double allow = lam1[i] + kappa_s * budget_raw[i];
                std::array<double, 6> m0, cm;
                for (int c = 0; c < 6; ++c) m0[c] = m_base[c][i];
                const double Ux = ub.v[0][i], Uy = ub.v[1][i], Uz = ub.v[2][i];
                cm = {2.0 * Ux * A[0], Ux * A[1] + Uy * A[0], Ux * A[2] + Uz * A[0],
                      2.0 * Uy * A[1], Uy * A[2] + Uz * A[1], 2.0 * Uz * A[2]};
                auto peak = [&](double s) {
                    std::array<double, 6> m;
                    const double iso = s * s / 3.0;
                    for (int c = 0; c < 6; ++c) m[c] = m0[c] + s * cm[c];
                    m[0] += iso;
                    m[3] += iso;
                    m[5] += iso;
                    return sym3_lambda_max(m);
                };
                auto feasible = [&](double a) {
                    return peak(a) <= allow && peak(-a) <= allow;
                };
                double hi = std::sqrt(3.0 * std::max(0.0, allow - lam1[i])) + 1e-12;
                double lo = 0.0;
                int grow = 0;
                while (feasible(hi) && grow++ < 6) {
                    lo = hi;
                    hi *= 2.0;
                }
                if (grow > 6) {
                    a2[i] = hi * hi;
                } else {
                    for (int it = 0; it < 30; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        (feasible(mid) ? lo : hi) = mid;
                    }
                    a2[i] = lo * lo;
                }
            }
            std::vector<double> solved = a2;
            smooth_scalar(lat, a2, smooth_cut);
            std::vector<double> amp(sz);
            for (long i = 0; i < sz; ++i)
                amp[i] = std::sqrt(std::min(a2[i], solved[i]));
            Wave wave = build_wave(lat, amp, ray, f, 2.399963 * double(wv + 1));

            for (int j = 0; j < cand.times(); ++j) {
                SpectralVelocity wj = wave.w;
                wj *= chi[j];
                cand.v[j] += wj;
                const double chi_p =
                    j + 1 < cand.times()
                        ? (chi[j + 1] - chi[j]) / (cand.t[j + 1] - cand.t[j])
                        : 0.0;
                StressGrid hj = wave.flux_abs;
                hj *= chi[j] * chi[j];
                StressGrid hd = wave.flux_dt;
                hd *= -chi_p;
                hj += hd;
                cand.H[j] += hj;
            }
            weak_norm += sobolev_norm(wave.w, -1.0);
            chosen.push_back(ridx);
        }
        const double new_margin = min_margin(cand);
        if (new_margin > std::max(0.0, opt.margin_keep * old_margin)) {
            // accepted: record measured diagnostics
            const double e_old = 0.5 * sq(sobolev_norm(sub.v[jb], 0.0));
            const double e_new = 0.5 * sq(sobolev_norm(cand.v[jb], 0.0));
            const double gain = e_new - e_old;
            // integral of the squared energy gap density at the base time
            VectorGrid vb = to_physical(sub.v[jb]);
            double gap_sq = 0.0;
            for (long i = 0; i < sz; ++i) {
                const double v2 = 0.5 * (sq(vb.v[0][i]) + sq(vb.v[1][i]) + sq(vb.v[2][i]));
                gap_sq += sq(e_density[jb] - v2);
            }
            gap_sq = gap_sq / double(sz) * kVol;
            cand.delta = new_margin;
            for (int r : chosen) cand.used_rays.push_back(r);
            cand.log["gain"] = gain;
            cand.log["alpha"] = e_density[jb] * kVol - e_new;
            cand.log["c_measured"] = gap_sq > 0.0 ? gain * e_density[jb] / gap_sq : 0.0;
            cand.log["weak_norm"] = weak_norm;
            cand.log["margin"] = new_margin;
            cand.log["frequency"] = freq;
            cand.log["retries"] = attempt;
            return cand;
        }
        // retry ladder: shrink amplitude, then also raise frequency
        scale *= 0.49;
        if (attempt >= 1) freq *= 2;
    }
    throw std::runtime_error("oscillation step: margin could not be preserved "
                             "within the retry cap");
}

}  // namespace

Subsolution oscillation_step(const Subsolution& sub, const std::vector<double>& e_density,
                             int frequency, const StepOptions& opt) {
    StepPlan plan;
    plan.base_index = 0;
    plan.chi_start = -1.0;
    return oscillation_core(sub, e_density, frequency, opt, plan);
}

Subsolution oscillation_step_at_stopping(const Subsolution& sub,
                                         const std::vector<double>& e_density, double tau,
                                         double eps, double alpha0, int frequency,
                                         const StepOptions& opt) {
    if (!(alpha0 > 0.0))
        throw std::invalid_argument("oscillation_step_at_stopping: alpha0 > 0 required");
    if (eps <= 0.0 || 2.0 * eps >= sub.t.back())
        throw std::invalid_argument("oscillation_step_at_stopping: need 0 < 2 eps < T");
    (void)tau;  // tau enters only through the functional indicator
    StepPlan plan;
    plan.chi_start = eps;
    // adapted assignment: base state at the first grid time >= eps
    plan.base_index = 0;
    while (plan.base_index + 1 < sub.times() && sub.t[plan.base_index] < eps)
        ++plan.base_index;
    return oscillation_core(sub, e_density, frequency, opt, plan);
}

// ---- energy functionals -------------------------------------------------------------

ScalarPath energy_series_el(const Subsolution& sub, double one_over_l) {
    if (one_over_l < 0.0 || one_over_l > 0.5)
        throw std::invalid_argument("energy_series_el: need 0 <= 1/l <= 1/2");
    const double hs2 = sub.gb.noise.hs_norm_sq(0.0);
    ScalarPath out;
    double ito = 0.0;
    const double e0 = 0.5 * sq(sobolev_norm(sub.v[0], 0.0));
    for (int j = 0; j < sub.times(); ++j) {
        out.t.push_back(sub.t[j]);
        out.v.push_back(e0 + ito +
                        (0.5 - one_over_l) * std::min(sub.t[j], sub.T_L) * hs2);
        if (j + 1 < sub.times()) {
            SpectralVelocity x = sub.v[j];
            x += sub.gb.gb[j];
            ito += inner_product(x, sub.gb.increment_at(j));
        }
    }
    return out;
}

double energy_functional_el(const Subsolution& sub, double one_over_l, double t) {
    ScalarPath s = energy_series_el(sub, one_over_l);
    int j = 0;
    while (j + 1 < int(s.t.size()) && s.t[j + 1] <= t + 1e-12) ++j;
    return s.v[j];
}

IFunctionals functionals_I(const std::vector<Subsolution>& ensemble, double eps,
                           double one_over_l, const std::vector<double>* taus) {
    if (ensemble.empty()) throw std::invalid_argument("functionals_I: empty ensemble");
    if (taus && taus->size() != ensemble.size())
        throw std::invalid_argument("functionals_I: tau list size mismatch");
    IFunctionals out;
    std::vector<double> vi, vt;
    for (size_t p = 0; p < ensemble.size(); ++p) {
        const Subsolution& sub = ensemble[p];
        ScalarPath el = energy_series_el(sub, one_over_l);
        std::vector<double> q(sub.times());
        for (int j = 0; j < sub.times(); ++j) {
            SpectralVelocity x = sub.v[j];
            x += sub.gb.gb[j];
            q[j] = 0.5 * sq(sobolev_norm(x, 0.0)) - el.v[j];
        }
        double acc = 0.0;
        for (int j = 0; j + 1 < sub.times(); ++j)
            if (sub.t[j] >= eps) acc += q[j] * (sub.t[j + 1] - sub.t[j]);
        vi.push_back(acc);
        const double tau = taus ? (*taus)[p] : sub.t.back();
        if (tau >= 2.0 * eps) {
            int j = 0;
            while (j + 1 < sub.times() && sub.t[j + 1] <= tau + 1e-12) ++j;
            vt.push_back(q[j]);
        } else {
            vt.push_back(0.0);
        }
    }
    auto mean_se = [](const std::vector<double>& v, double& m, double& se) {
        m = 0.0;
        for (double x : v) m += x;
        m /= double(v.size());
        double s = 0.0;
        for (double x : v) s += sq(x - m);
        se = v.size() > 1 ? std::sqrt(s / double(v.size() - 1) / double(v.size())) : 0.0;
    };
    mean_se(vi, out.I_eps, out.se_eps);
    mean_se(vt, out.I_tau_eps, out.se_tau);
    return out;
}

// ---- shaping and emission -------------------------------------------------------------

namespace {

// modulate v(t) = m(t) v_base so the kinetic energy tracks e_l exactly where
// the quadratic solve admits it; the matching flux -m' R[v_base] keeps the
// transport identity exact
void shape_to_energy(Subsolution& sub, double one_over_l) {
    const double hs2 = sub.gb.noise.hs_norm_sq(0.0);
    const SpectralVelocity v_base = sub.v[0];
    const double A = 0.5 * sq(sobolev_norm(v_base, 0.0));
    if (A <= 0.0) return;
    StressGrid rv = stress_from_spectral(inverse_divergence_sym(v_base));

    const double e0 = A;
    double ito = 0.0;
    std::vector<double> m(sub.times(), 1.0);
    for (int j = 0; j < sub.times(); ++j) {
        if (j > 0) {
            const double target =
                e0 + ito + (0.5 - one_over_l) * std::min(sub.t[j], sub.T_L) * hs2;
            const double B = inner_product(v_base, sub.gb.gb[j]);
            const double C = 0.5 * sq(sobolev_norm(sub.gb.gb[j], 0.0)) - target;
            const double disc = B * B - 4.0 * A * C;
            if (disc >= 0.0) {
                m[j] = (-B + std::sqrt(disc)) / (2.0 * A);
            } else {
                m[j] = -B / (2.0 * A);  // closest achievable energy
            }
            m[j] = std::max(m[j], 0.0);
            sub.v[j] = v_base;
            sub.v[j] *= m[j];
        }
        SpectralVelocity x = sub.v[j];
        x += sub.gb.gb[j];
        if (j + 1 < sub.times()) ito += inner_product(x, sub.gb.increment_at(j));
    }
    for (int j = 0; j + 1 < sub.times(); ++j) {
        const double mp = (m[j + 1] - m[j]) / (sub.t[j + 1] - sub.t[j]);
        StressGrid f = rv;
        f *= -mp;
        sub.H[j] += f;
    }
    sub.log["shaping_min_m"] = *std::min_element(m.begin(), m.end());
    sub.log["shaping_max_m"] = *std::max_element(m.begin(), m.end());
}

DissipativeTrajectory emit_trajectory(const Subsolution& sub, const WildOptions& opt) {
    const WaveLattice& lat = sub.lat;
    const long sz = lat.size();
    const double hs2 = sub.gb.noise.hs_norm_sq(0.0);
    const int times = sub.times();

    DissipativeTrajectory tr;
    tr.lat = lat;
    tr.seed = sub.gb.seed;
    tr.t = sub.t;
    tr.xnorm_sq.resize(times);
    tr.z.resize(times);
    tr.dissipation.assign(times, 0.0);
    tr.trace_y.resize(times);

    StressGrid y_run(lat);
    std::vector<double> ito(times, 0.0), marty(times, 0.0);
    std::vector<double> trace_int(times, 0.0);
    if (opt.store_fields) {
        tr.x.reserve(times);
        tr.y.reserve(times);
    }
    for (int j = 0; j < times; ++j) {
        SpectralVelocity x = sub.v[j];
        x += sub.gb.gb[j];
        tr.xnorm_sq[j] = sq(sobolev_norm(x, 0.0));
        if (j > 0) ito[j] = ito[j - 1];
        trace_int[j] = trace_integral(y_run);
        if (opt.store_fields) {
            tr.x.push_back(x);
            tr.y.push_back(y_run);
        }
        if (j + 1 < times) {
            // stress on interval j: H_j + q I with q the pointwise lambda_max
            std::vector<double> q = e_lambda_max_field(x, sub.H[j]);
            StressGrid r = sub.H[j];
            const double h = sub.t[j + 1] - sub.t[j];
            for (long i = 0; i < sz; ++i) {
                const double qq = (2.0 / 3.0) * q[i];
                r.m[0][i] += qq;
                r.m[3][i] += qq;
                r.m[5][i] += qq;
            }
            r *= h;
            y_run += r;
            ito[j + 1] = ito[j] + inner_product(x, sub.gb.increment_at(j));
        }
    }
    tr.trace_y = trace_int;

    // initial energy: the kinetic value plus the finite-depth defect budget
    const double slope_coeff = 1.0 - 2.0 * opt.one_over_l;
    double z0_req = tr.xnorm_sq[0];
    for (int j = 0; j < times; ++j) {
        const double growth =
            2.0 * ito[j] + slope_coeff * std::min(sub.t[j], sub.T_L) * hs2;
        double need = tr.xnorm_sq[j] - growth;
        if (j + 1 < times) {
            const double h = sub.t[j + 1] - sub.t[j];
            need = std::max(need, (trace_int[j + 1] - trace_int[j]) / h - growth);
        }
        z0_req = std::max(z0_req, need);
    }
    z0_req *= 1.0 + 1e-9;
    double z0 = opt.z0_override >= 0.0 ? opt.z0_override : z0_req;
    if (z0 < z0_req)
        throw std::invalid_argument("wild emission: z0 override below the defect budget " +
                                    std::to_string(z0_req));
    for (int j = 0; j < times; ++j)
        tr.z[j] = z0 + 2.0 * ito[j] + slope_coeff * std::min(sub.t[j], sub.T_L) * hs2;
    tr.z0 = z0;
    tr.metadata["one_over_l"] = opt.one_over_l;
    tr.metadata["L"] = opt.L;
    tr.metadata["K"] = opt.K;
    tr.metadata["T_L"] = sub.T_L;
    tr.metadata["z0_required"] = z0_req;
    tr.metadata["z_headroom"] = z0 - tr.xnorm_sq[0];
    tr.metadata["hs2"] = hs2;
    tr.metadata["dt"] = times > 1 ? sub.t[1] - sub.t[0] : 0.0;
    for (const auto& [k, v] : sub.log) tr.metadata[k] = v;
    return tr;
}

}  // namespace

DissipativeTrajectory wild_generate(const WienerPath& driver, const WildOptions& opt,
                                    Subsolution* out_sub) {
    const WaveLattice& lat = driver.gb.front().lat;
    const double T = driver.t.back();
    PathStop st = stopping_time_TL(driver, opt.L, opt.delta_stop, opt.beta_stop,
                                   opt.p_stop);
    WienerPath gbL = stopped_path(driver, st.time);

    EnergyProfile prof = admissible_energy(driver.noise, lat, opt.L, T, driver.dt,
                                           opt.delta);
    // per-path feasibility: the profile must clear this stopped driver too
    auto build_density = [&](const EnergyProfile& p) {
        std::vector<double> e(driver.t.size());
        for (size_t j = 0; j < driver.t.size(); ++j) e[j] = p.value(driver.t[j]);
        return e;
    };
    std::vector<double> e_density = build_density(prof);
    int doublings = 0;
    for (;;) {
        double worst = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < gbL.gb.size(); ++j) {
            const double s = sup_norm(gbL.gb[j]);
            worst = std::min(worst, e_density[j] - 1.5 * s * s);
        }
        if (worst > opt.delta) break;
        prof.e0 *= 2.0;
        ++doublings;
        if (doublings > 24)
            throw std::runtime_error("wild_generate: profile cannot clear this driver");
        e_density = build_density(prof);
    }

    Subsolution sub = base_subsolution(gbL, st.time, e_density, opt.delta);
    double alpha_prev = std::numeric_limits<double>::infinity();
    double alpha0 = e_density[0] * kVol;
    double gain_total = 0.0;
    for (int k = 0; k < opt.K; ++k) {
        sub = oscillation_step(sub, e_density, 1 << k, opt.step);
        const double alpha_k = sub.log.at("alpha");
        if (alpha_k >= alpha_prev)
            throw std::runtime_error("wild_generate: alpha recursion is not decreasing at "
                                     "step " + std::to_string(k));
        alpha_prev = alpha_k;
        gain_total += sub.log.at("gain");
        sub.log["alpha_" + std::to_string(k + 1)] = alpha_k;
    }
    sub.log["alpha_0"] = alpha0;
    sub.log["alpha_K"] = alpha_prev;
    sub.log["gain_total"] = gain_total;

    shape_to_energy(sub, opt.one_over_l);

    // single-path residual of the energy identity past eps = T/8
    {
        ScalarPath el = energy_series_el(sub, opt.one_over_l);
        double acc = 0.0;
        for (int j = 0; j + 1 < sub.times(); ++j) {
            if (sub.t[j] < T / 8.0) continue;
            SpectralVelocity x = sub.v[j];
            x += sub.gb.gb[j];
            acc += (0.5 * sq(sobolev_norm(x, 0.0)) - el.v[j]) * (sub.t[j + 1] - sub.t[j]);
        }
        sub.log["I_eps_path"] = acc;
    }

    if (out_sub) *out_sub = sub;
    return emit_trajectory(sub, opt);
}

// ---- continuation past the stopping time --------------------------------------------

DissipativeTrajectory extend_beyond(const DissipativeTrajectory& wild, double tau,
                                    const NoiseCoefficient& g, const ExtendConfig& cfg) {
    if (wild.x.empty() || wild.y.empty())
        throw std::invalid_argument("extend_beyond: stored field snapshots required");
    int j_tau = -1;
    for (int j = 0; j < wild.times(); ++j)
        if (std::abs(wild.t[j] - tau) < 1e-9) j_tau = j;
    if (j_tau < 0)
        throw std::invalid_argument("extend_beyond: tau is not on the trajectory grid");

    const double h = wild.times() > 1 ? wild.t[1] - wild.t[0] : 0.0;
    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : 2.0 * wild.t.back();
    if (horizon < tau - 1e-12)
        throw std::invalid_argument("extend_beyond: horizon before tau");

    DissipativeTrajectory out;
    out.lat = wild.lat;
    out.seed = wild.seed;
    out.z0 = wild.z0;
    out.metadata = wild.metadata;
    out.metadata["seam_time"] = tau;
    for (int j = 0; j <= j_tau; ++j) {
        out.t.push_back(wild.t[j]);
        out.xnorm_sq.push_back(wild.xnorm_sq[j]);
        out.z.push_back(wild.z[j]);
        out.dissipation.push_back(wild.dissipation[j]);
        out.trace_y.push_back(wild.trace_y[j]);
        out.x.push_back(wild.x[j]);
        out.y.push_back(wild.y[j]);
    }
    if (horizon <= tau + 1e-12) return out;  // pure wild trajectory

    SolverConfig sc;
    sc.lat = wild.lat;
    sc.n = cfg.n > 0 ? cfg.n : wild.lat.N / 2 - 1;
    sc.dt = cfg.dt > 0.0 ? cfg.dt : h;
    sc.T = horizon - tau;
    sc.noise = g;
    sc.seed = cfg.seed;
    sc.u0 = wild.x[j_tau];
    sc.store_x = true;
    sc.store_y = true;
    sc.output_stride = 1;
    {
        SpectralVelocity probe = sc.u0;
        leray_project(probe);
        galerkin_project(probe, sc.n);
        if (sq(sobolev_norm(probe, 0.0)) > wild.z[j_tau] + 1e-12)
            throw std::invalid_argument("extend_beyond: restart state leaves the "
                                        "admissible set (||x||^2 > z)");
    }
    sc.z0 = wild.z[j_tau];
    DissipativeTrajectory gal = simulate(sc);

    const double d0 = wild.dissipation[j_tau];
    const double ty0 = wild.trace_y[j_tau];
    for (int j = 1; j < gal.times(); ++j) {
        out.t.push_back(tau + gal.t[j]);
        out.xnorm_sq.push_back(gal.xnorm_sq[j]);
        out.z.push_back(gal.z[j]);  // gal.z starts exactly at wild.z[j_tau]
        out.dissipation.push_back(d0 + gal.dissipation[j]);
        out.trace_y.push_back(ty0 + gal.trace_y[j]);
        out.x.push_back(gal.x[j]);
        StressGrid y = gal.y[j];
        y += wild.y[j_tau];
        out.y.push_back(std::move(y));
    }
    return out;
}

}  // namespace euler
