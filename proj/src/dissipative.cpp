#include "euler/dissipative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace euler {

bool VerificationReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass || c.degenerate) return false;
    return !checks.empty();
}

bool VerificationReport::degenerate() const {
    for (const auto& c : checks)
        if (c.degenerate) return true;
    return false;
}

std::string report_json(const VerificationReport& r) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : r.checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["degenerate"] = c.degenerate;
        e["margin"] = c.margin;
        if (c.p_value >= 0.0) e["p_value"] = c.p_value;
        e["violation_times"] = c.violation_times;
        if (!c.note.empty()) e["note"] = c.note;
        j.push_back(e);
    }
    nlohmann::json top;
    top["pass"] = r.pass();
    top["checks"] = j;
    return top.dump(2);
}

// ---- defect -----------------------------------------------------------------

DefectSeries compute_defect(const DissipativeTrajectory& traj) {
    DefectSeries out;
    if (traj.y.size() < 2 || traj.x.size() != traj.y.size()) {
        out.degenerate = true;
        return out;
    }
    const int strides = int(traj.y.size()) - 1;
    out.t.resize(strides);
    out.defect.resize(strides);
    out.min_eig.resize(strides);
    out.trace.resize(strides);
    for (int j = 0; j < strides; ++j) {
        const double h = traj.t[j + 1] - traj.t[j];
        if (h <= 0.0) throw std::invalid_argument("compute_defect: nonincreasing grid");
        StressGrid rate = traj.y[j + 1];
        rate -= traj.y[j];
        rate *= 1.0 / h;
        rate -= nonlinear_stress(traj.x[j]);
        out.t[j] = traj.t[j];
        out.min_eig[j] = min_eigenvalue(rate);
        out.trace[j] = trace_integral(rate);
        out.defect[j] = std::move(rate);
    }
    return out;
}

// ---- contract checks ----------------------------------------------------------

VerificationReport check_M3(const DissipativeTrajectory& traj, double tol_energy,
                            double frac_tol) {
    VerificationReport rep;
    const int n = traj.times();
    if (tol_energy < 0.0) {
        double supz = 0.0, h = 0.0;
        for (int j = 0; j < n; ++j) supz = std::max(supz, std::abs(traj.z[j]));
        if (n > 1) h = (traj.t.back() - traj.t.front()) / (n - 1);
        // prefer the generating step size when the trajectory records it
        auto it = traj.metadata.find("dt");
        if (it != traj.metadata.end() && it->second > 0.0) h = it->second;
        tol_energy = 5.0 * h * (1.0 + supz);
    }

    CheckResult tr;
    tr.name = "trace_rate_le_z";
    tr.margin = 0.0;
    int violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int j = 0; j + 1 < n; ++j) {
        const double h = traj.t[j + 1] - traj.t[j];
        const double rate = (traj.trace_y[j + 1] - traj.trace_y[j]) / h;
        const double bound = std::max(traj.z[j], traj.z[j + 1]) + tol_energy;
        worst = std::min(worst, bound - rate);
        if (rate > bound) {
            ++violations;
            if (tr.violation_times.size() < 32) tr.violation_times.push_back(traj.t[j]);
        }
    }
    tr.margin = (n > 1) ? worst : 0.0;
    tr.pass = n > 1 && double(violations) <= frac_tol * double(n - 1);
    tr.degenerate = n <= 1;
    rep.checks.push_back(std::move(tr));

    CheckResult en;
    en.name = "energy_le_z";
    double worst_e = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int j = 0; j < n; ++j) {
        const double m = traj.z[j] + tol_energy - traj.xnorm_sq[j];
        worst_e = std::min(worst_e, m);
        if (m < 0.0) {
            ok = false;
            if (en.violation_times.size() < 32) en.violation_times.push_back(traj.t[j]);
        }
    }
    en.margin = (n > 0) ? worst_e : 0.0;
    en.pass = ok && n > 0;
    rep.checks.push_back(std::move(en));
    return rep;
}

namespace {

double mean_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / double(v.size());
}

double var_of(const std::vector<double>& v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / double(v.size() - 1);
}

// two-sided normal tail for a correlation estimate on n samples
double corr_p_value(double r, int n) {
    const double z = std::abs(r) * std::sqrt(double(n));
    return std::erfc(z / std::sqrt(2.0));
}

}  // namespace

VerificationReport martingale_test(
    const std::vector<DissipativeTrajectory>& ensemble,
    const std::vector<std::pair<std::string, SpectralVelocity>>& test_fields,
    const NoiseCoefficient& g, double var_tol) {
    VerificationReport rep;
    const int n = int(ensemble.size());
    if (n < 100) {
        CheckResult c;
        c.name = "ensemble_size";
        c.degenerate = true;
        c.note = "need >= 100 independent paths, have " + std::to_string(n);
        rep.checks.push_back(std::move(c));
        return rep;
    }
    const int times = ensemble.front().times();
    const int mid = times / 2;
    const int last = times - 1;
    const double t_last = ensemble.front().t[last];

    for (const auto& [name, e] : test_fields) {
        std::vector<double> m_mid(n), m_last(n);
        for (int p = 0; p < n; ++p) {
            const auto& tr = ensemble[p];
            const auto& proj = tr.observables.at("proj_" + name);
            const auto& comp = tr.observables.at("comp_" + name);
            m_mid[p] = (proj[mid] - proj[0]) + comp[mid];
            m_last[p] = (proj[last] - proj[0]) + comp[last];
        }
        const double qv = g.qv_rate(e) * t_last;

        CheckResult mc;
        mc.name = "mean_zero:" + name;
        const double mean = mean_of(m_last);
        const double var = var_of(m_last, mean);
        const double se = std::sqrt(var / double(n));
        mc.margin = 3.0 * se - std::abs(mean);
        mc.pass = std::abs(mean) <= 3.0 * se || (qv == 0.0 && std::abs(mean) < 1e-12);
        rep.checks.push_back(std::move(mc));

        CheckResult vc;
        vc.name = "quadratic_variation:" + name;
        if (qv == 0.0) {
            double worst = 0.0;
            for (double x : m_last) worst = std::max(worst, std::abs(x));
            vc.pass = worst < 1e-12;
            vc.margin = 1e-12 - worst;
            vc.note = "zero-noise branch";
        } else {
            vc.pass = std::abs(var - qv) <= var_tol * qv;
            vc.margin = var_tol * qv - std::abs(var - qv);
        }
        rep.checks.push_back(std::move(vc));

        CheckResult lc;
        lc.name = "lag_correlation:" + name;
        if (qv == 0.0) {
            lc.pass = true;
            lc.note = "zero-noise branch";
        } else {
            const double mm = mean_of(m_mid);
            std::vector<double> incr(n);
            for (int p = 0; p < n; ++p) incr[p] = m_last[p] - m_mid[p];
            const double mi = mean_of(incr);
            double cov = 0.0;
            for (int p = 0; p < n; ++p) cov += (m_mid[p] - mm) * (incr[p] - mi);
            cov /= double(n - 1);
            const double vv = var_of(m_mid, mm) * var_of(incr, mi);
            const double r = vv > 0.0 ? cov / std::sqrt(vv) : 0.0;
            lc.p_value = corr_p_value(r, n);
            lc.pass = lc.p_value > 0.01;
            lc.margin = lc.p_value - 0.01;
        }
        rep.checks.push_back(std::move(lc));
    }
    return rep;
}

// ---- relative energy -----------------------------------------------------------

RelativeEnergy relative_energy(const DissipativeTrajectory& traj,
                               const DissipativeTrajectory& strong) {
    if (traj.times() != strong.times())
        throw std::invalid_argument("relative_energy: grid mismatch");
    for (int j = 0; j < traj.times(); ++j)
        if (std::abs(traj.t[j] - strong.t[j]) > 1e-12)
            throw std::invalid_argument("relative_energy: grid mismatch");
    if (traj.x.size() != size_t(traj.times()) || strong.x.size() != size_t(strong.times()))
        throw std::invalid_argument("relative_energy: stored velocity snapshots required");

    RelativeEnergy out;
    for (int j = 0; j < traj.times(); ++j) {
        const double un = sobolev_norm(strong.x[j], 0.0);
        const double xu = inner_product(traj.x[j], strong.x[j]);
        const double er = 0.5 * traj.z[j] - xu + 0.5 * un * un;
        SpectralVelocity d = traj.x[j];
        d -= strong.x[j];
        const double dn = sobolev_norm(d, 0.0);
        out.e_rel.t.push_back(traj.t[j]);
        out.e_rel.v.push_back(er);
        out.kinetic.t.push_back(traj.t[j]);
        out.kinetic.v.push_back(0.5 * dn * dn);
        out.defect.t.push_back(traj.t[j]);
        out.defect.v.push_back(0.5 * (traj.z[j] - traj.xnorm_sq[j]));
    }
    return out;
}

ScalarPath gradient_sup_series(const DissipativeTrajectory& traj) {
    ScalarPath out;
    for (size_t s = 0; s < traj.x.size(); ++s) {
        const SpectralVelocity& u = traj.x[s];
        std::vector<double> acc(u.lat.size(), 0.0);
        for (int j = 0; j < 3; ++j) {
            SpectralVelocity dj(u.lat);
            for (long i = 0; i < u.lat.size(); ++i) {
                const auto k = u.lat.wavevector(i);
                const cplx ik(0.0, double(k[j]));
                for (int d = 0; d < 3; ++d) dj.c[d][i] = ik * u.c[d][i];
            }
            VectorGrid g = to_physical(dj);
            for (long i = 0; i < u.lat.size(); ++i)
                for (int d = 0; d < 3; ++d) acc[i] += g.v[d][i] * g.v[d][i];
        }
        double sup = 0.0;
        for (double a : acc) sup = std::max(sup, a);
        out.t.push_back(traj.t[s]);
        out.v.push_back(std::sqrt(sup));
    }
    return out;
}

VerificationReport gronwall_monitor(const ScalarPath& e_rel, const ScalarPath& grad_sup,
                                    double c, double tol) {
    if (e_rel.t.size() != grad_sup.t.size())
        throw std::invalid_argument("gronwall_monitor: grid mismatch");
    VerificationReport rep;
    CheckResult ck;
    ck.name = "gronwall_envelope";
    double integral = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (size_t j = 0; j < e_rel.t.size(); ++j) {
        if (j > 0)
            integral += 0.5 * (grad_sup.v[j] + grad_sup.v[j - 1]) *
                        (e_rel.t[j] - e_rel.t[j - 1]);
        const double envelope = e_rel.v[0] * std::exp(c * integral) + tol;
        const double m = envelope - e_rel.v[j];
        worst = std::min(worst, m);
        if (m < 0.0 && ok) {
            ok = false;
            ck.violation_times.push_back(e_rel.t[j]);
        }
    }
    ck.margin = worst;
    ck.pass = ok;
    rep.checks.push_back(std::move(ck));
    return rep;
}

}  // namespace euler
