// Constructive-engine tests: the pointwise energy functional and its bounds,
// exact discrete transport after wave additions, the gain recursion, the
// admissible profile search, energy bookkeeping, full generation, and the
// continuation past the stopping time.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "euler/convexint.hpp"
#include "euler/dissipative.hpp"

using namespace euler;

namespace {

WienerPath zero_driver(const WaveLattice& lat, double T, double dt) {
    WienerPath p;
    p.noise = NoiseCoefficient{};
    p.dt = dt;
    const int steps = int(std::llround(T / dt));
    for (int j = 0; j <= steps; ++j) {
        p.t.push_back(j * dt);
        p.gb.emplace_back(lat);
    }
    return p;
}

double op_norm(const std::array<double, 6>& h) {
    auto ev = sym3_eigenvalues(h);
    return std::max(std::abs(ev[0]), std::abs(ev[2]));
}

}  // namespace

TEST_CASE("pointwise functional: closed forms and the two-sided bounds") {
    CHECK(e_lambda_max({0, 0, 0}, {0, 0, 0, 0, 0, 0}) == 0.0);
    // rank-one: e(w, 0) = (3/2) |w|^2
    CHECK(e_lambda_max({2, 0, 0}, {0, 0, 0, 0, 0, 0}) == doctest::Approx(6.0));
    // pure stress: e(0, diag(2,-1,-1)) = (3/2) lambda_max(-H) = 3/2
    CHECK(e_lambda_max({0, 0, 0}, {2, 0, 0, -1, 0, -1}) == doctest::Approx(1.5));
    CHECK_THROWS_AS(e_lambda_max({0, 0, 0}, {1, 0, 0, 0, 0, 0}), std::invalid_argument);

    // (1/2)|w|^2 <= e and ||H||_op <= (4/3) e on random samples
    std::mt19937_64 rng(77);
    std::normal_distribution<double> nd(0.0, 1.0);
    int violations = 0;
    for (int s = 0; s < 100000; ++s) {
        std::array<double, 3> w = {nd(rng), nd(rng), nd(rng)};
        double a = nd(rng), b = nd(rng);
        std::array<double, 6> h = {a, nd(rng), nd(rng), b, nd(rng), -a - b};
        const double e = e_lambda_max(w, h);
        const double k = 0.5 * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
        if (k > e + 1e-12) ++violations;
        if (op_norm(h) > (4.0 / 3.0) * e + 1e-12) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("one oscillation step: exact transport, positive gain, kept margin") {
    WaveLattice lat(16);
    WienerPath drv = zero_driver(lat, 0.2, 0.025);
    std::vector<double> e_density(drv.t.size(), 1.0);
    Subsolution base = base_subsolution(drv, 0.2, e_density, 0.1);
    CHECK(base.delta == doctest::Approx(1.0));

    Subsolution s1 = oscillation_step(base, e_density, 1);
    SubsolutionAudit a = subsolution_audit(s1);
    CHECK(a.max_pde_residual < 1e-8);
    CHECK(a.max_divergence < 1e-9);
    CHECK(a.max_trace < 1e-10);
    CHECK(a.min_margin > 0.0);
    CHECK(s1.log.at("gain") > 0.0);
    CHECK(s1.log.at("alpha") < 1.0 * kTorusVolume);
    CHECK(s1.log.at("c_measured") > 0.0);

    // higher oscillation index: weaker in the negative Sobolev norm
    Subsolution s8 = oscillation_step(base, e_density, 6);
    CHECK(s8.log.at("weak_norm") < s1.log.at("weak_norm"));

    // degenerate profile: strict margin precondition fails
    std::vector<double> zero_profile(drv.t.size(), 0.0);
    CHECK_THROWS_AS(oscillation_step(base, zero_profile, 1), std::invalid_argument);
    CHECK_THROWS_AS(base_subsolution(drv, 0.2, zero_profile, 0.1), std::invalid_argument);
}

TEST_CASE("gain recursion: strictly decreasing deficit, half recovered") {
    WaveLattice lat(16);
    WienerPath drv = zero_driver(lat, 0.1, 0.025);
    std::vector<double> e_density(drv.t.size(), 1.0);
    Subsolution sub = base_subsolution(drv, 0.1, e_density, 0.1);
    const double alpha0 = 1.0 * kTorusVolume;

    double prev = alpha0, gain_total = 0.0;
    for (int k = 0; k < 5; ++k) {
        sub = oscillation_step(sub, e_density, 1 << k);
        const double alpha = sub.log.at("alpha");
        CHECK(alpha < prev);
        prev = alpha;
        gain_total += sub.log.at("gain");
        CHECK(sub.log.at("margin") > 0.0);
    }
    SubsolutionAudit a = subsolution_audit(sub);
    CHECK(a.max_pde_residual < 1e-7);
    CHECK(a.min_margin > 0.0);
    CHECK(gain_total >= 0.5 * alpha0);
}

TEST_CASE("admissible profile: zero-noise collapse, monotone constant, decay") {
    WaveLattice lat(8);
    NoiseCoefficient none{};
    EnergyProfile p0 = admissible_energy(none, lat, 2.0, 0.5, 0.01, 0.05);
    CHECK(p0.C_L == doctest::Approx(1.0));
    CHECK(p0.value(0.0) == doctest::Approx(p0.e0));
    CHECK(p0.value(0.5) > 0.05);
    CHECK(p0.value(0.5) < p0.value(0.1));

    NoiseCoefficient g = NoiseCoefficient::spectral(1, 0.15);
    EnergyProfile pa = admissible_energy(g, lat, 0.5, 0.25, 0.005, 0.05);
    EnergyProfile pb = admissible_energy(g, lat, 2.0, 0.25, 0.005, 0.05);
    EnergyProfile pc = admissible_energy(g, lat, 8.0, 0.25, 0.005, 0.05);
    CHECK(pa.C_L <= pb.C_L);
    CHECK(pb.C_L <= pc.C_L);
    for (double t : {0.0, 0.05, 0.1, 0.2, 0.25}) {
        CHECK(pb.value(t) <= pb.e0);
        CHECK(pb.value(t) > 0.05);
    }
}

TEST_CASE("energy series: initial value and the 1/l defect slope") {
    WaveLattice lat(8);
    NoiseCoefficient g = NoiseCoefficient::spectral(1, 0.1);
    WienerPath drv = WienerPath::sample(g, lat, 7, 0.01, 20);
    PathStop st = stopping_time_TL(drv, 2.0, 0.1, 0.375, 20.0);
    WienerPath gbL = stopped_path(drv, st.time);
    std::vector<double> e_density(drv.t.size(), 1.0);
    Subsolution sub = base_subsolution(gbL, st.time, e_density, 0.05);

    ScalarPath inf = energy_series_el(sub, 0.0);
    ScalarPath two = energy_series_el(sub, 0.5);
    CHECK(inf.v[0] == doctest::Approx(0.0));
    const double hs2 = g.hs_norm_sq(0.0);
    for (size_t j = 0; j < inf.t.size(); ++j) {
        const double expect = 0.5 * std::min(inf.t[j], st.time) * hs2;
        CHECK(std::abs((inf.v[j] - two.v[j]) - expect) < 1e-12);
    }
    CHECK(energy_functional_el(sub, 0.0, drv.t.back()) ==
          doctest::Approx(inf.v.back()));

    // zero driver, zero state: the I functionals vanish identically
    WienerPath zp = zero_driver(lat, 0.2, 0.01);
    std::vector<double> e1(zp.t.size(), 1.0);
    std::vector<Subsolution> ens = {base_subsolution(zp, 0.2, e1, 0.05)};
    IFunctionals fi = functionals_I(ens, 0.05, 0.5);
    CHECK(std::abs(fi.I_eps) < 1e-14);
    CHECK(std::abs(fi.I_tau_eps) < 1e-14);
}

TEST_CASE("wild generation: audits, contract checks, exact reconstruction") {
    WaveLattice lat(16);
    NoiseCoefficient g = NoiseCoefficient::spectral(1, 0.1);
    WienerPath drv = WienerPath::sample(g, lat, 11, 0.005, 40);

    WildOptions opt;
    opt.K = 3;
    opt.one_over_l = 0.0;
    Subsolution sub;
    DissipativeTrajectory tr = wild_generate(drv, opt, &sub);

    SubsolutionAudit a = subsolution_audit(sub);
    CHECK(a.max_pde_residual < 1e-6);
    CHECK(a.max_divergence < 1e-8);
    CHECK(check_M3(tr).pass());
    CHECK(tr.metadata.at("alpha_1") > tr.metadata.at("alpha_2"));
    CHECK(tr.metadata.at("alpha_2") > tr.metadata.at("alpha_3"));

    // shaping makes the kinetic profile track the energy series exactly
    ScalarPath el = energy_series_el(sub, 0.0);
    double worst = 0.0, scale = 0.0;
    for (int j = 0; j < tr.times(); ++j) {
        worst = std::max(worst, std::abs(0.5 * tr.xnorm_sq[j] - el.v[j]));
        scale = std::max(scale, std::abs(el.v[j]));
    }
    CHECK(worst < 1e-8 * (1.0 + scale));

    // reconstructed compensated martingale = iterated driver integral
    ScalarPath mbar = mbar_reconstruct(tr.x[0], tr.xnorm_sq, tr.y, sub.gb,
                                       opt.one_over_l, sub.T_L);
    ScalarPath iter = iterated_integral(sub.gb);
    double wm = 0.0, sm = 0.0;
    for (size_t j = 0; j < mbar.t.size(); ++j) {
        wm = std::max(wm, std::abs(mbar.v[j] - iter.v[j]));
        sm = std::max(sm, std::abs(iter.v[j]));
    }
    CHECK(wm < 1e-8 * (1.0 + sm));

    // the l = 2 variant removes the full Ito slope from the kinetic profile
    WildOptions opt2 = opt;
    opt2.one_over_l = 0.5;
    DissipativeTrajectory t2 = wild_generate(drv, opt2);
    const double TL = tr.metadata.at("T_L");
    const double hs2 = g.hs_norm_sq(0.0);
    const double expect = 0.5 * std::min(drv.t.back(), TL) * hs2;
    const double slope_inf = 0.5 * (tr.xnorm_sq.back() - tr.xnorm_sq.front());
    const double slope_two = 0.5 * (t2.xnorm_sq.back() - t2.xnorm_sq.front());
    CHECK(std::abs((slope_inf - slope_two) - expect) < 0.15 * std::abs(expect));
    // the z bookkeeping carries the same separation exactly
    const double zs = (tr.z.back() - tr.z.front()) - (t2.z.back() - t2.z.front());
    CHECK(std::abs(zs - 2.0 * expect) < 1e-10 * (1.0 + std::abs(zs)));
}

TEST_CASE("continuation: seam continuity and the contract on the whole path") {
    WaveLattice lat(16);
    NoiseCoefficient g = NoiseCoefficient::spectral(1, 0.1);
    WienerPath drv = WienerPath::sample(g, lat, 13, 0.005, 40);
    WildOptions opt;
    opt.K = 2;
    DissipativeTrajectory tr = wild_generate(drv, opt);

    const int mid = tr.times() / 2;
    const double tau = tr.t[mid];
    ExtendConfig cfg;
    cfg.horizon = tr.t.back() + 0.1;
    cfg.seed = 5;
    DissipativeTrajectory out = extend_beyond(tr, tau, g, cfg);
    CHECK(out.t.back() == doctest::Approx(cfg.horizon).epsilon(1e-9));
    CHECK(out.z[mid] == tr.z[mid]);          // seam value untouched
    CHECK(out.z[mid + 1] != 0.0);            // continuation really ran
    // zero jump: the first continuation value starts from the seam energy
    CHECK(std::abs(out.z[mid + 1] - out.z[mid]) < 0.1 * (1.0 + std::abs(out.z[mid])));
    CHECK(check_M3(out).pass());
    for (size_t j = 1; j < out.dissipation.size(); ++j)
        CHECK(out.dissipation[j] >= out.dissipation[j - 1]);

    // tau at the left end: the whole path is the viscous continuation
    DissipativeTrajectory left = extend_beyond(tr, 0.0, g, cfg);
    CHECK(left.t.front() == 0.0);
    CHECK(check_M3(left).pass());

    // horizon at tau: the wild prefix is returned unchanged
    ExtendConfig stop_cfg = cfg;
    stop_cfg.horizon = tau;
    DissipativeTrajectory pre = extend_beyond(tr, tau, g, stop_cfg);
    CHECK(pre.times() == mid + 1);

    CHECK_THROWS_AS(extend_beyond(tr, tau + 0.3 * (tr.t[1] - tr.t[0]), g, cfg),
                    std::invalid_argument);
}
