// Acceptance gate: twelve end-to-end criteria, one PASS/FAIL line each.
// Tolerances are pinned here; the process exits with the number of failures.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "euler/convexint.hpp"
#include "euler/dissipative.hpp"
#include "euler/galerkin.hpp"
#include "euler/paths.hpp"
#include "euler/selection.hpp"

using namespace euler;

namespace {

int failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d (%s): %s\n", pass ? "PASS" : "FAIL", idx, name,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

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

double weier(double t, double h, uint32_t phase_seed) {
    double acc = 0.0;
    for (int j = 0; j <= 14; ++j) {
        const double f = std::pow(2.0, j);
        acc += std::pow(f, -h) * std::cos(f * t * 7.3 + 0.61 * phase_seed * (j + 1));
    }
    return acc;
}

// ---- criteria ---------------------------------------------------------------

void criterion_1_spectral() {
    const double t0 = now_s();
    WaveLattice lat(16);
    double worst_idem = 0.0, worst_div = 0.0;
    for (int s = 0; s < 100; ++s) {
        SpectralVelocity u = random_velocity(lat, 1000 + s, 2.0, /*divergence_free=*/false);
        SpectralVelocity p = u;
        leray_project(p);
        SpectralVelocity pp = p;
        leray_project(pp);
        double idem = 0.0, norm = 0.0, divn = 0.0;
        for (long i = 0; i < lat.size(); ++i) {
            const auto k = lat.wavevector(i);
            cplx div = 0.0;
            for (int d = 0; d < 3; ++d) {
                idem = std::max(idem, std::abs(pp.c[d][i] - p.c[d][i]));
                norm += std::norm(p.c[d][i]);
                div += cplx(0.0, double(k[d])) * p.c[d][i];
            }
            divn = std::max(divn, std::abs(div));
        }
        worst_idem = std::max(worst_idem, idem);
        worst_div = std::max(worst_div, divn / std::sqrt(std::max(norm, 1e-300)));
    }
    const double dt = now_s() - t0;
    const bool pass = worst_idem < 1e-12 && worst_div < 1e-12 && dt < 5.0;
    report(1, "spectral invariants", pass,
           fmt("idempotency %.2e, relative divergence %.2e, %.2f s", worst_idem,
               worst_div, dt));
}

void criterion_2_energy_audit() {
    auto max_residual = [](const SolverConfig& cfg) {
        DissipativeTrajectory tr = simulate(cfg);
        double worst = 0.0;
        for (int j = 0; j < tr.times(); ++j) {
            const double r = tr.z[j] - tr.xnorm_sq[j] - (tr.z[0] - tr.xnorm_sq[0]) -
                             tr.dissipation[j];
            worst = std::max(worst, std::abs(r));
        }
        return worst;
    };
    double acc_coarse = 0.0, acc_fine = 0.0;
    for (int s = 0; s < 10; ++s) {
        SolverConfig cfg;
        cfg.lat = WaveLattice(16);
        cfg.n = 4;
        cfg.dt = 0.01;
        cfg.T = 0.5;
        cfg.noise = NoiseCoefficient::spectral(2, 0.3);
        cfg.seed = 3000 + s;
        cfg.u0 = random_velocity(cfg.lat, 77);
        cfg.u0 *= 0.3;
        acc_coarse += max_residual(cfg);
        cfg.dt = 0.005;
        acc_fine += max_residual(cfg);
    }
    const double ratio = acc_coarse / acc_fine;
    const bool pass = ratio > 1.5 && ratio < 2.5;
    report(2, "energy audit halves with the step", pass,
           fmt("mean residual %.3e -> %.3e, ratio %.2f (need within 2 +- 25%%)",
               acc_coarse / 10, acc_fine / 10, ratio));
}

void criterion_3_martingale() {
    const double t0 = now_s();
    WaveLattice lat(8);
    NoiseCoefficient g = NoiseCoefficient::spectral(2, 0.4);
    std::vector<std::pair<std::string, SpectralVelocity>> tests;
    const std::array<std::array<int, 3>, 3> ks = {{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}}};
    for (int m = 0; m < 3; ++m) {
        SpectralVelocity e(lat);
        auto pol = NoiseCoefficient::polarization(ks[m]);
        const long ip = lat.flat_k(ks[m][0], ks[m][1], ks[m][2]);
        const long im = lat.flat_k(-ks[m][0], -ks[m][1], -ks[m][2]);
        for (int d = 0; d < 3; ++d) {
            e.c[d][ip] = pol[0][d] / std::sqrt(2.0);
            e.c[d][im] = pol[0][d] / std::sqrt(2.0);
        }
        tests.emplace_back("m" + std::to_string(m), e);
    }
    std::vector<DissipativeTrajectory> ens;
    ens.reserve(10000);
    for (int p = 0; p < 10000; ++p) {
        SolverConfig cfg;
        cfg.lat = lat;
        cfg.n = 4;
        cfg.nu_override = 1.0 / 16.0;
        cfg.dt = 0.005;
        cfg.T = 0.25;
        cfg.noise = g;
        cfg.seed = 40000 + p;
        cfg.test_fields = tests;
        ens.push_back(simulate(cfg));
        ens.back().x.clear();
        ens.back().y.clear();
    }
    VerificationReport rep = martingale_test(ens, tests, g, /*var_tol=*/0.05);
    const double dt = now_s() - t0;
    const bool pass = rep.pass() && dt < 600.0;
    double worst_margin = 1e300;
    for (const auto& c : rep.checks) worst_margin = std::min(worst_margin, c.margin);
    report(3, "martingale suite 1e4 paths", pass,
           fmt("%zu checks, worst margin %.3e, %.0f s", rep.checks.size(), worst_margin,
               dt));
}

void criterion_4_apriori() {
    WaveLattice lat(8);
    NoiseCoefficient g = NoiseCoefficient::spectral(2, 0.3);
    const double hs2 = g.hs_norm_sq(0.0);
    double acc = 0.0;
    double z0 = 0.0;
    for (int p = 0; p < 1000; ++p) {
        SolverConfig cfg;
        cfg.lat = lat;
        cfg.n = 4;
        cfg.dt = 0.01;
        cfg.T = 1.0;
        cfg.noise = g;
        cfg.seed = 60000 + p;
        cfg.u0 = random_velocity(lat, 55);
        cfg.u0 *= 0.4;
        DissipativeTrajectory tr = simulate(cfg);
        z0 = tr.z[0];
        double sup = 0.0;
        for (double z : tr.z) sup = std::max(sup, z);
        acc += sup;
    }
    const double mean_sup = acc / 1000.0;
    // Doob + Gronwall constant for additive noise: E sup z <= (z0 + C) e^C
    const double C = 2.0 + 3.0 * hs2;
    const double bound = (z0 + C) * std::exp(C);
    const bool pass = mean_sup <= bound;
    report(4, "a priori energy bound", pass,
           fmt("E sup z = %.4f, bound (z0 + C) e^C = %.4f (z0 = %.4f, C = %.4f)",
               mean_sup, bound, z0, C));
}

void criterion_5_young() {
    const double t0 = now_s();
    auto s = [](double t) { return std::sin(t); };
    YoungResult r = young_integral(s, s, 0.0, 1.0, 0.9, 0.9, 1e-10);
    const double target = 0.5 * std::sin(1.0) * std::sin(1.0);
    const bool value_ok = r.converged && std::abs(r.value - target) < 1e-8;

    auto f = [](double t) { return weier(t, 0.65, 1); };
    auto gfun = [](double t) { return weier(t, 0.65, 2); };
    YoungResult w = young_integral(gfun, f, 0.0, 1.0, 0.6, 0.6, 1e-12, 18);
    const bool slope_ok = w.remainder_slope >= 0.6 + 0.6 - 0.1;
    const double dt = now_s() - t0;
    const bool pass = value_ok && slope_ok && dt < 30.0;
    report(5, "Young/sewing quadrature", pass,
           fmt("value error %.2e, remainder slope %.3f (need >= 1.1), %.2f s",
               std::abs(r.value - target), w.remainder_slope, dt));
}

void criterion_6_functional_bounds() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd(0.0, 1.0);
    int violations = 0;
    for (int s = 0; s < 100000; ++s) {
        std::array<double, 3> w = {nd(rng), nd(rng), nd(rng)};
        const double a = nd(rng), b = nd(rng);
        std::array<double, 6> h = {a, nd(rng), nd(rng), b, nd(rng), -a - b};
        const double e = e_lambda_max(w, h);
        const double kin = 0.5 * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
        auto ev = sym3_eigenvalues(h);
        const double op = std::max(std::abs(ev[0]), std::abs(ev[2]));
        if (kin > e + 1e-12) ++violations;
        if (op > (4.0 / 3.0) * e + 1e-12) ++violations;
    }
    report(6, "pointwise functional bounds", violations == 0,
           fmt("%d violations on 1e5 samples (tolerance 1e-12)", violations));
}

void criterion_7_recursion() {
    WaveLattice lat(16);
    WienerPath drv = zero_driver(lat, 0.2, 0.05);
    std::vector<double> e_density(drv.t.size(), 1.0);
    Subsolution sub = base_subsolution(drv, drv.t.back(), e_density, 0.05);
    const double vol = 8.0 * M_PI * M_PI * M_PI;
    const double alpha0 = vol;  // e * volume minus zero initial kinetic energy
    double gain_total = 0.0;
    double alpha_prev = alpha0;
    bool margins_ok = true, alpha_ok = true, pde_ok = true;
    for (int k = 0; k < 5; ++k) {
        sub = oscillation_step(sub, e_density, 1 << k);
        gain_total += sub.log.at("gain");
        const double alpha_k = sub.log.at("alpha");
        alpha_ok = alpha_ok && alpha_k < alpha_prev;
        alpha_prev = alpha_k;
        margins_ok = margins_ok && sub.log.at("margin") > 0.0;
        SubsolutionAudit audit = subsolution_audit(sub);
        pde_ok = pde_ok && audit.max_pde_residual < 1e-7;
    }
    const double frac = gain_total / alpha0;
    const bool pass = frac >= 0.5 && alpha_ok && margins_ok && pde_ok;
    report(7, "five-step gain recursion", pass,
           fmt("gain fraction %.3f (need >= 0.5), alpha monotone %d, margins %d, pde %d",
               frac, int(alpha_ok), int(margins_ok), int(pde_ok)));
}

void criterion_8_nonuniqueness() {
    WaveLattice lat(16);
    NoiseCoefficient g = NoiseCoefficient::spectral(1, 0.1);
    const double hs2 = g.hs_norm_sq(0.0);
    const double T = 0.2, dt = 0.005;
    double diff_acc = 0.0, expect_acc = 0.0;
    for (int p = 0; p < 100; ++p) {
        WienerPath drv = WienerPath::sample(g, lat, 70000 + p, dt, int(T / dt));
        WildOptions wi;
        wi.K = 2;
        wi.one_over_l = 0.0;
        wi.store_fields = false;
        DissipativeTrajectory ti = wild_generate(drv, wi);
        WildOptions w2 = wi;
        w2.one_over_l = 0.5;
        DissipativeTrajectory t2 = wild_generate(drv, w2);
        // kinetic-energy normalization: z/2 carries (1/2 - 1/l)(t ^ TL) hs2
        diff_acc += 0.5 * ((ti.z.back() - ti.z.front()) - (t2.z.back() - t2.z.front()));
        expect_acc += 0.5 * std::min(T, ti.metadata.at("T_L")) * hs2;
    }
    const double rel = std::abs(diff_acc - expect_acc) / expect_acc;
    const bool pass = rel <= 0.10;
    report(8, "energy-defect separation l=2 vs l=inf", pass,
           fmt("mean defect gap %.5f vs (1/2)||G||^2 E(t^T_L) = %.5f, rel err %.3f",
               diff_acc / 100, expect_acc / 100, rel));
}

void criterion_9_mbar() {
    WaveLattice lat(16);
    NoiseCoefficient g = NoiseCoefficient::spectral(1, 0.1);
    const double dt = 1e-3, T = 0.1;
    WienerPath drv = WienerPath::sample(g, lat, 81, dt, int(T / dt));
    WildOptions opt;
    opt.K = 2;
    Subsolution sub;
    DissipativeTrajectory tr = wild_generate(drv, opt, &sub);
    ScalarPath mbar = mbar_reconstruct(tr.x.front(), tr.xnorm_sq, tr.y, sub.gb,
                                       opt.one_over_l, tr.metadata.at("T_L"));
    ScalarPath iter = iterated_integral(sub.gb);
    double worst = 0.0, scale = 0.0;
    for (size_t j = 0; j < mbar.v.size(); ++j) {
        worst = std::max(worst, std::abs(mbar.v[j] - iter.v[j]));
        scale = std::max(scale, std::abs(iter.v[j]));
    }
    const double rel = worst / std::max(scale, 1e-300);
    const bool pass = rel <= 0.05;
    report(9, "compensated-martingale identification", pass,
           fmt("sup |Mbar - iterated| = %.3e, sup |iterated| = %.3e, rel %.4f", worst,
               scale, rel));
}

void criterion_10_seam() {
    WaveLattice lat(16);
    NoiseCoefficient g = NoiseCoefficient::spectral(1, 0.1);
    int ok = 0;
    double worst_jump = 0.0;
    for (int r = 0; r < 10; ++r) {
        WienerPath drv = WienerPath::sample(g, lat, 90000 + r, 0.005, 40);
        WildOptions opt;
        opt.K = 1;
        DissipativeTrajectory tr = wild_generate(drv, opt);
        const double t_l = tr.metadata.at("T_L");
        int jl = 0;
        while (jl + 1 < tr.times() && tr.t[jl + 1] <= t_l + 1e-12) ++jl;
        ExtendConfig ec;
        ec.seed = 1234 + r;
        DissipativeTrajectory ext = extend_beyond(tr, tr.t[jl], g, ec);
        const double jump = std::abs(ext.z[jl] - tr.z[jl]);
        worst_jump = std::max(worst_jump, jump);
        if (check_M3(ext).pass() && jump == 0.0) ++ok;
    }
    report(10, "seam-audited concatenation", ok == 10,
           fmt("%d/10 runs pass with zero z-jump (worst jump %.2e)", ok, worst_jump));
}

void criterion_11_12_selection() {
    WaveLattice lat(16);
    NoiseCoefficient g = NoiseCoefficient::spectral(1, 0.1);
    const double T = 0.2, dt = 0.005;
    // a law needs all members to share the initial datum exactly, and the
    // constructed datum depends on the driver: pair the two defect parameters
    // per driver (one member each, common z0) and select per pair
    int l2_chosen = 0, differ = 0, deterministic = 0, order_ok = 0;
    const int pairs = 3;
    for (int p = 0; p < pairs; ++p) {
        WienerPath drv = WienerPath::sample(g, lat, 95000 + p, dt, int(T / dt));
        WildOptions wi;
        wi.K = 2;
        wi.one_over_l = 0.0;
        wi.store_fields = false;
        WildOptions w2 = wi;
        w2.one_over_l = 0.5;
        // probe the per-path energy requirement, then emit both laws from a
        // common initial datum (x0, y0, z0)
        DissipativeTrajectory pi = wild_generate(drv, wi);
        DissipativeTrajectory p2 = wild_generate(drv, w2);
        const double z0 = std::max(pi.metadata.at("z0_required"),
                                   p2.metadata.at("z0_required")) *
                          (1.0 + 1e-6);
        wi.z0_override = z0;
        w2.z0_override = z0;
        EnsembleLaw lawinf, law2;
        lawinf.name = "linf";
        lawinf.members.push_back(wild_generate(drv, wi));
        law2.name = "l2";
        law2.members.push_back(wild_generate(drv, w2));
        law2.normalize();
        lawinf.normalize();

        double sup_trace = 0.0;
        for (const auto* law : {&law2, &lawinf})
            for (const auto& m : law->members)
                for (double v : m.trace_y) sup_trace = std::max(sup_trace, std::abs(v));
        DiscountedFunctional F =
            make_functional("neg_trace_y", 1.0, 1.01 * sup_trace + 1.0);
        DiscountedFunctional negF = F;
        negF.name = "trace_y";
        negF.f = [](const DissipativeTrajectory& tr, int j) { return tr.trace_y[j]; };

        SelectionResult with_f = krylov_select({law2, lawinf}, {F});
        SelectionResult with_f2 = krylov_select({law2, lawinf}, {F});
        SelectionResult with_negf = krylov_select({law2, lawinf}, {negF});
        if (with_f.law.name == "l2") ++l2_chosen;
        if (with_f.law.name != with_negf.law.name) ++differ;
        if (with_f.decision_log == with_f2.decision_log) ++deterministic;
        if (admissibility_order(law2, lawinf) == OrderVerdict::FirstPrecedes) ++order_ok;
    }
    report(11, "dissipation-first selection",
           l2_chosen == pairs && differ == pairs && deterministic == pairs,
           fmt("F chose l2 on %d/%d pairs (order l2<linf on %d), F vs -F differ on %d, "
               "logs stable on %d",
               l2_chosen, pairs, order_ok, differ, deterministic));

    // criterion 12: discounted dissipation identity on viscous laws
    EnsembleLaw glaw;
    glaw.name = "galerkin";
    for (int p = 0; p < 10; ++p) {
        SolverConfig cfg;
        cfg.lat = WaveLattice(8);
        cfg.n = 2;
        cfg.dt = 0.005;
        cfg.T = 0.5;
        cfg.noise = NoiseCoefficient::spectral(2, 0.3);
        cfg.seed = 97000 + p;
        cfg.u0 = random_velocity(cfg.lat, 31);
        cfg.u0 *= 0.3;
        glaw.members.push_back(simulate(cfg));
    }
    glaw.normalize();
    C1Identity id = energy_functional_C1(glaw, 1.0);
    const bool pass12 = id.gap <= 0.01 * std::abs(id.lhs);
    report(12, "discounted dissipation identity", pass12,
           fmt("lhs %.6e, rhs %.6e, gap %.2e (need <= 1%% of magnitude)", id.lhs,
               id.rhs, id.gap));
}

}  // namespace

int main() {
    criterion_1_spectral();
    criterion_2_energy_audit();
    criterion_3_martingale();
    criterion_4_apriori();
    criterion_5_young();
    criterion_6_functional_bounds();
    criterion_7_recursion();
    criterion_8_nonuniqueness();
    criterion_9_mbar();
    criterion_10_seam();
    criterion_11_12_selection();
    std::printf("%s: %d of 12 criteria failed\n", failures == 0 ? "OK" : "FAILED",
                failures);
    return failures;
}
