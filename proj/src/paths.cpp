#include "euler/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace euler {

namespace {

// pair visitation policy: all pairs for small paths, dyadic lags above budget
template <typename F>
void for_pairs(int n, int budget, F&& visit) {
    if (n <= budget) {
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < j; ++i) visit(i, j);
    } else {
        for (int lag = 1; lag < n; lag *= 2)
            for (int i = 0; i + lag < n; ++i) visit(i, i + lag);
        for (int j = 1; j < n; ++j) visit(0, j);  // anchor pairs
    }
}

double regression_slope(const std::vector<double>& y) {
    // least-squares slope of y against 0,1,2,...
    const int n = int(y.size());
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += i; sy += y[i]; sxx += double(i) * i; sxy += i * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

// ---- seminorms -----------------------------------------------------------------

double holder_seminorm(const std::vector<double>& t,
                       const std::function<double(int, int)>& dist, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0)
        throw std::invalid_argument("holder_seminorm: alpha in (0,1] required");
    const int n = int(t.size());
    double sup = 0.0;
    for_pairs(n, kMaxAllPairs, [&](int i, int j) {
        const double dt = t[j] - t[i];
        if (dt <= 0.0) return;
        sup = std::max(sup, dist(i, j) / std::pow(dt, alpha));
    });
    return sup;
}

double holder_seminorm(const ScalarPath& f, double alpha) {
    return holder_seminorm(
        f.t, [&](int i, int j) { return std::abs(f.v[j] - f.v[i]); }, alpha);
}

double holder_seminorm(const std::vector<double>& t,
                       const std::vector<SpectralVelocity>& f, double s, double alpha) {
    // field paths get a smaller all-pairs budget: each pair costs O(N^3)
    const int budget = 512;
    if (alpha <= 0.0 || alpha > 1.0)
        throw std::invalid_argument("holder_seminorm: alpha in (0,1] required");
    double sup = 0.0;
    for_pairs(int(t.size()), budget, [&](int i, int j) {
        const double dt = t[j] - t[i];
        if (dt <= 0.0) return;
        SpectralVelocity d = f[j];
        d -= f[i];
        sup = std::max(sup, sobolev_norm(d, s) / std::pow(dt, alpha));
    });
    return sup;
}

double sobolev_slobodeckij_norm(const std::vector<double>& t,
                                const std::function<double(int, int)>& dist,
                                const std::function<double(int)>& vnorm, double alpha,
                                double p) {
    if (p < 1.0) throw std::invalid_argument("sobolev_slobodeckij: p >= 1 required");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("sobolev_slobodeckij: alpha in (0,1) required");
    if (alpha * p >= p + 1.0)
        throw std::invalid_argument("sobolev_slobodeckij: alpha p < p + 1 required");
    const int n = int(t.size());
    if (n < 2) return 0.0;
    auto weight = [&](int i) {
        const double lo = i > 0 ? t[i - 1] : t[0];
        const double hi = i + 1 < n ? t[i + 1] : t[n - 1];
        return 0.5 * (hi - lo);
    };
    double lp = 0.0;
    for (int i = 0; i < n; ++i) lp += std::pow(std::abs(vnorm(i)), p) * weight(i);
    double dd = 0.0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i) {
            const double dt = t[j] - t[i];
            dd += std::pow(dist(i, j), p) / std::pow(dt, 1.0 + alpha * p) * weight(i) * weight(j);
        }
    return std::pow(lp + 2.0 * dd, 1.0 / p);
}

double sobolev_slobodeckij_norm(const ScalarPath& f, double alpha, double p) {
    return sobolev_slobodeckij_norm(
        f.t, [&](int i, int j) { return std::abs(f.v[j] - f.v[i]); },
        [&](int i) { return f.v[i]; }, alpha, p);
}

// ---- Young integration ------------------------------------------------------------

YoungResult young_integral(const std::function<double(double)>& g,
                           const std::function<double(double)>& f, double a, double b,
                           double alpha, double beta, double tol, int max_level,
                           bool left_point) {
    if (!(alpha + beta > 1.0))
        throw std::invalid_argument("young_integral: alpha + beta > 1 required");
    YoungResult res;
    auto germ = [&](double s, double u, double gs, double gu, double fs, double fu) {
        return (left_point ? gs : 0.5 * (gs + gu)) * (fu - fs);
    };
    double prev = 0.0;
    for (int m = 0; m <= max_level; ++m) {
        const long nint = 1L << m;
        const double h = (b - a) / double(nint);
        double sum = 0.0, maxrem = 0.0;
        for (long i = 0; i < nint; ++i) {
            const double s = a + h * i, u = a + h * (i + 1), c = 0.5 * (s + u);
            const double gs = g(s), gu = g(u), gc = g(c);
            const double fs = f(s), fu = f(u), fc = f(c);
            const double parent = germ(s, u, gs, gu, fs, fu);
            const double children = germ(s, c, gs, gc, fs, fc) + germ(c, u, gc, gu, fc, fu);
            sum += parent;
            maxrem = std::max(maxrem, std::abs(children - parent));
        }
        if (m > 0) {
            res.level_correction.push_back(std::abs(sum - prev));
            res.max_remainder.push_back(maxrem);
        }
        res.value = sum;
        prev = sum;
        if (m > 1 && res.level_correction.back() < tol) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged && res.level_correction.size() >= 4) {
        // demand at least a decreasing tail, otherwise the sums do not converge
        const auto& c = res.level_correction;
        if (c.back() > c[c.size() - 4])
            throw std::runtime_error("young_integral: compound sums do not converge");
    }
    std::vector<double> logs;
    for (double r : res.max_remainder)
        if (r > 0.0) logs.push_back(std::log2(r));
    res.remainder_slope = -regression_slope(logs);
    return res;
}

YoungResult young_integral(const ScalarPath& g, const ScalarPath& f, double alpha,
                           double beta, double tol, bool left_point) {
    if (!(alpha + beta > 1.0))
        throw std::invalid_argument("young_integral: alpha + beta > 1 required");
    if (g.t.size() != f.t.size() || g.t.size() < 2)
        throw std::invalid_argument("young_integral: incompatible grids");
    const int J = int(g.t.size()) - 1;  // intervals
    YoungResult res;
    auto germ = [&](int i, int j) {
        const double w = left_point ? g.v[i] : 0.5 * (g.v[i] + g.v[j]);
        return w * (f.v[j] - f.v[i]);
    };
    // compound sums on coarsened grids, stride halving down to the grid itself
    std::vector<double> sums;
    for (int stride = J; stride >= 1; stride = stride / 2) {
        double sum = 0.0;
        int i = 0;
        while (i < J) {
            const int j = std::min(i + stride, J);
            sum += germ(i, j);
            i = j;
        }
        sums.push_back(sum);
        if (stride == 1) break;
    }
    for (size_t m = 1; m < sums.size(); ++m)
        res.level_correction.push_back(std::abs(sums[m] - sums[m - 1]));
    // local sewing defect at the finest level against double-step parents
    double maxrem = 0.0;
    for (int i = 0; i + 2 <= J; i += 2)
        maxrem = std::max(maxrem, std::abs(germ(i, i + 1) + germ(i + 1, i + 2) - germ(i, i + 2)));
    res.max_remainder.push_back(maxrem);
    res.path.t = f.t;
    res.path.v.assign(J + 1, 0.0);
    for (int i = 0; i < J; ++i) res.path.v[i + 1] = res.path.v[i] + germ(i, i + 1);
    res.value = res.path.v.back();
    res.converged = res.level_correction.empty() || res.level_correction.back() < tol ||
                    res.level_correction.back() <= res.level_correction.front();
    if (!res.converged)
        throw std::runtime_error("young_integral: compound sums do not converge on grid");
    return res;
}

// ---- Ito integrals -------------------------------------------------------------------

ScalarPath ito_integral(const std::vector<SpectralVelocity>& h, const WienerPath& b) {
    if (h.size() != b.gb.size())
        throw std::invalid_argument("ito_integral: integrand/driver grid mismatch");
    ScalarPath out;
    out.t = b.t;
    out.v.assign(b.t.size(), 0.0);
    for (int j = 0; j < b.steps(); ++j) {
        SpectralVelocity d = b.increment_at(j);
        out.v[j + 1] = out.v[j] + inner_product(h[j], d);
    }
    return out;
}

ScalarPath ito_integral(const SpectralVelocity& h, const WienerPath& b) {
    ScalarPath out;
    out.t = b.t;
    out.v.assign(b.t.size(), 0.0);
    for (int j = 0; j < b.steps(); ++j) {
        SpectralVelocity d = b.increment_at(j);
        out.v[j + 1] = out.v[j] + inner_product(h, d);
    }
    return out;
}

ScalarPath iterated_integral(const WienerPath& b) { return ito_integral(b.gb, b); }

// ---- compensated martingale reconstruction ----------------------------------------------

ScalarPath mbar_reconstruct(const SpectralVelocity& x0, const std::vector<double>& xnorm_sq,
                            const std::vector<StressGrid>& y, const WienerPath& b,
                            double one_over_l, double horizon_TL) {
    const size_t J = b.gb.size();
    if (xnorm_sq.size() != J || y.size() != J)
        throw std::invalid_argument("mbar_reconstruct: grid mismatch");
    const double gsq = b.noise.hs_norm_sq(0.0);
    ScalarPath out;
    out.t = b.t;
    out.v.assign(J, 0.0);
    double young = 0.0;
    for (size_t j = 0; j < J; ++j) {
        if (j > 0) {
            // left-point germ of < x(0) - P div (y - y(0)), G db >
            StressGrid dy = y[j - 1];
            dy -= y[0];
            SpectralVelocity a = divergence_of_stress(dy);
            leray_project(a);
            a *= -1.0;
            a += x0;
            SpectralVelocity db = b.increment_at(int(j) - 1);
            young += inner_product(a, db);
        }
        const double tcap = std::min(out.t[j], horizon_TL);
        out.v[j] = 0.5 * xnorm_sq[j] - 0.5 * xnorm_sq[0] -
                   (0.5 - one_over_l) * tcap * gsq - young;
    }
    return out;
}

// ---- stopping times -------------------------------------------------------------------

namespace {

// running profiles of the three monitored norms along the grid prefix
struct NormProfiles {
    std::vector<double> sup_hs;      // sup_{r<=t} ||GB(r)||_{H^{(3+sigma)/2}}
    std::vector<double> holder_h1;   // Hölder-(1/2-2delta) seminorm in H^1 on [0,t]
    std::vector<double> wbeta;       // W^{beta,p} norm of the scalar path on [0,t]
};

NormProfiles norm_profiles(const WienerPath& b, const ScalarPath& scalar, double delta,
                           double beta, double p) {
    const int J = int(b.gb.size());
    const double s_hs = (3.0 + b.noise.sigma) / 2.0;
    const double alpha_h = 0.5 - 2.0 * delta;
    NormProfiles pr;
    pr.sup_hs.assign(J, 0.0);
    pr.holder_h1.assign(J, 0.0);
    pr.wbeta.assign(J, 0.0);
    // precompute H^1 norms of pairwise differences incrementally (all pairs)
    double sup1 = 0.0, suph = 0.0;
    std::vector<double> h1(J, 0.0);
    const double dt = b.dt;
    double lp = 0.0, dd = 0.0;
    for (int j = 0; j < J; ++j) {
        sup1 = std::max(sup1, sobolev_norm(b.gb[j], s_hs));
        pr.sup_hs[j] = sup1;
        for (int i = 0; i < j; ++i) {
            SpectralVelocity d = b.gb[j];
            d -= b.gb[i];
            const double dn = sobolev_norm(d, 1.0);
            const double tdiff = b.t[j] - b.t[i];
            suph = std::max(suph, dn / std::pow(tdiff, alpha_h));
            dd += std::pow(std::abs(scalar.v[j] - scalar.v[i]), p) /
                  std::pow(tdiff, 1.0 + beta * p) * dt * dt;
        }
        pr.holder_h1[j] = suph;
        lp += std::pow(std::abs(scalar.v[j]), p) * dt;
        pr.wbeta[j] = std::pow(lp + 2.0 * dd, 1.0 / p);
    }
    return pr;
}

PathStop scan(const WienerPath& b, const NormProfiles& pr, double threshold, double cap) {
    PathStop st;
    const int J = int(b.gb.size());
    for (int j = 0; j < J; ++j) {
        const double n0 = pr.sup_hs[j], n1 = pr.holder_h1[j], n2 = pr.wbeta[j];
        if (n0 >= threshold || n1 >= threshold || n2 >= threshold) {
            st.index = j;
            st.which = n0 >= threshold ? 0 : (n1 >= threshold ? 1 : 2);
            st.time = std::min(b.t[j], cap);
            st.norms = {n0, n1, n2};
            return st;
        }
        if (b.t[j] >= cap) {
            st.time = cap;
            st.norms = {n0, n1, n2};
            return st;
        }
    }
    st.time = b.t.back();
    st.censored = b.t.back() < cap;
    st.norms = {pr.sup_hs[J - 1], pr.holder_h1[J - 1], pr.wbeta[J - 1]};
    return st;
}

}  // namespace

PathStop stopping_time_TL(const WienerPath& b, double L, double delta, double beta,
                          double p) {
    if (L <= 0.0) throw std::invalid_argument("stopping_time_TL: L > 0 required");
    ScalarPath ii = iterated_integral(b);
    NormProfiles pr = norm_profiles(b, ii, delta, beta, p);
    return scan(b, pr, L, L);
}

TauLResult stopping_time_tauL(const ScalarPath& mbar, const WienerPath& b, double L,
                              double delta, double beta, double p) {
    if (L <= 0.0) throw std::invalid_argument("stopping_time_tauL: L > 0 required");
    if (mbar.t.size() != b.t.size())
        throw std::invalid_argument("stopping_time_tauL: grid mismatch");
    NormProfiles pr = norm_profiles(b, mbar, delta, beta, p);
    TauLResult res;
    res.schedule = {1, 2, 4, 8, 16};
    for (int n : res.schedule) {
        const double thr = L - 1.0 / n;
        PathStop st = scan(b, pr, thr, thr);
        res.tau_n.push_back(st.time);
        res.stop = st;
    }
    return res;
}

}  // namespace euler
