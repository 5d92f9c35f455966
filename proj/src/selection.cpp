#include "euler/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace euler {

namespace {

constexpr double kDatumTol = 1e-9;

bool same_scalar(double a, double b) {
    return std::abs(a - b) <= kDatumTol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

void check_member_datum(const DissipativeTrajectory& a, const DissipativeTrajectory& b,
                        const char* where) {
    if (a.times() == 0 || b.times() == 0)
        throw std::invalid_argument(std::string(where) + ": empty trajectory");
    if (!same_scalar(a.t[0], b.t[0]) || !same_scalar(a.xnorm_sq[0], b.xnorm_sq[0]) ||
        !same_scalar(a.trace_y[0], b.trace_y[0]) || !same_scalar(a.z[0], b.z[0]))
        throw std::invalid_argument(std::string(where) + ": initial-datum mismatch");
}

void hash_bytes(uint64_t& h, const void* data, size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;  // FNV-1a
    }
}

void hash_double(uint64_t& h, double x) {
    uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    hash_bytes(h, &bits, sizeof(bits));
}

void hash_series(uint64_t& h, const std::vector<double>& v) {
    uint64_t n = v.size();
    hash_bytes(h, &n, sizeof(n));
    for (double x : v) hash_double(h, x);
}

double clip(double v, double bound) {
    if (bound <= 0.0) return v;
    return std::clamp(v, -bound, bound);
}

// int_{t0}^{t0+h} e^{-lambda s} (A0 + (A1-A0) u/h) ds, u = s - t0; exact for
// piecewise-linear data, so the discounted dissipation identity closes to
// roundoff on the grid
double stride_integral_exp(double lambda, double t0, double h, double a0, double a1) {
    const double g0 = std::exp(-lambda * t0);
    const double c0 = -std::expm1(-lambda * h) / lambda;  // int_0^h e^{-lambda u} du
    const double c1 = (1.0 - std::exp(-lambda * h) * (1.0 + lambda * h)) /
                      (lambda * lambda);  // int_0^h u e^{-lambda u} du
    return g0 * (a0 * c0 + (a1 - a0) / h * c1);
}

}  // namespace

void EnsembleLaw::normalize() {
    if (members.empty()) throw std::invalid_argument("EnsembleLaw: no members");
    if (weights.empty()) weights.assign(members.size(), 1.0);
    if (weights.size() != members.size())
        throw std::invalid_argument("EnsembleLaw: ragged weights");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("EnsembleLaw: negative weight");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("EnsembleLaw: zero total weight");
    for (double& w : weights) w /= total;
    for (size_t m = 1; m < members.size(); ++m)
        check_member_datum(members[0], members[m], "EnsembleLaw");
}

void EnsembleLaw::validate() const {
    if (members.empty() || weights.size() != members.size())
        throw std::invalid_argument("EnsembleLaw: shape mismatch");
    double total = 0.0;
    for (double w : weights) total += w;
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("EnsembleLaw: weights not normalized");
    for (size_t m = 1; m < members.size(); ++m)
        check_member_datum(members[0], members[m], "EnsembleLaw");
}

uint64_t law_hash(const EnsembleLaw& law) {
    uint64_t h = 1469598103934665603ull;
    for (size_t m = 0; m < law.members.size(); ++m) {
        const auto& tr = law.members[m];
        hash_bytes(h, &tr.seed, sizeof(tr.seed));
        hash_double(h, law.weights.empty() ? 1.0 : law.weights[m]);
        hash_double(h, tr.z0);
        hash_series(h, tr.t);
        hash_series(h, tr.xnorm_sq);
        hash_series(h, tr.z);
        hash_series(h, tr.trace_y);
    }
    return h;
}

DiscountedFunctional make_functional(const std::string& key, double lambda, double bound,
                                     double horizon) {
    DiscountedFunctional J;
    J.name = key;
    J.lambda = lambda;
    J.bound = bound;
    J.horizon = horizon;
    if (key == "kinetic_energy") {
        J.f = [](const DissipativeTrajectory& tr, int j) { return 0.5 * tr.xnorm_sq[j]; };
    } else if (key == "neg_trace_y") {
        J.f = [](const DissipativeTrajectory& tr, int j) { return -tr.trace_y[j]; };
    } else if (key == "energy_z") {
        J.f = [](const DissipativeTrajectory& tr, int j) { return tr.z[j]; };
    } else if (key.rfind("observable:", 0) == 0) {
        const std::string obs = key.substr(11);
        J.f = [obs](const DissipativeTrajectory& tr, int j) {
            return tr.observables.at(obs)[j];
        };
    } else {
        throw std::invalid_argument("make_functional: unknown key " + key);
    }
    return J;
}

DiscountedValue discounted_value(const EnsembleLaw& law, const DiscountedFunctional& J) {
    law.validate();
    if (J.lambda <= 0.0) throw std::invalid_argument("discounted_value: lambda must be > 0");
    if (!J.f) throw std::invalid_argument("discounted_value: no integrand");
    DiscountedValue out;
    double h_eff = std::numeric_limits<double>::infinity();
    double sup_f = 0.0;
    for (size_t m = 0; m < law.members.size(); ++m) {
        const auto& tr = law.members[m];
        const double horizon = J.horizon > 0.0 ? J.horizon : tr.t.back();
        if (tr.t.back() < horizon - 1e-12)
            throw std::invalid_argument("discounted_value: trajectory does not cover horizon");
        h_eff = std::min(h_eff, horizon);
        // piecewise-linear F with exponentially exact stride weights, so
        // constant integrands reproduce their closed forms
        double acc = 0.0;
        double prev_t = tr.t[0];
        double prev_f = clip(J.f(tr, 0), J.bound);
        sup_f = std::max(sup_f, std::abs(prev_f));
        for (int j = 1; j < tr.times() && prev_t < horizon - 1e-12; ++j) {
            double fj = clip(J.f(tr, j), J.bound);
            sup_f = std::max(sup_f, std::abs(fj));
            double tj = tr.t[j];
            if (tj > horizon) {  // partial last stride, linear interpolation
                const double s = (horizon - prev_t) / (tj - prev_t);
                fj = (1.0 - s) * prev_f + s * fj;
                tj = horizon;
            }
            acc += stride_integral_exp(J.lambda, prev_t, tj - prev_t, prev_f, fj);
            prev_t = tj;
            prev_f = fj;
        }
        out.value += law.weights[m] * acc;
    }
    const double f_bound = J.bound > 0.0 ? J.bound : sup_f;
    out.tail_bound = f_bound * std::exp(-J.lambda * h_eff) / J.lambda;
    return out;
}

C1Identity energy_functional_C1(const EnsembleLaw& law, double lambda) {
    law.validate();
    if (lambda <= 0.0) throw std::invalid_argument("energy_functional_C1: lambda must be > 0");
    C1Identity out;
    for (size_t m = 0; m < law.members.size(); ++m) {
        const auto& tr = law.members[m];
        if (tr.times() < 2)
            throw std::invalid_argument("energy_functional_C1: need >= 2 grid times");
        double lhs = 0.0;
        double diss = 0.0;  // int e^{-lambda s} (-tr R) ds, R the stress rate
        for (int j = 0; j + 1 < tr.times(); ++j) {
            const double h = tr.t[j + 1] - tr.t[j];
            lhs += stride_integral_exp(lambda, tr.t[j], h, -tr.trace_y[j], -tr.trace_y[j + 1]);
            const double rate = (tr.trace_y[j + 1] - tr.trace_y[j]) / h;
            diss += stride_integral_exp(lambda, tr.t[j], h, -rate, -rate);
        }
        const double boundary = -tr.trace_y[0] * std::exp(-lambda * tr.t[0]) / lambda +
                                tr.trace_y.back() * std::exp(-lambda * tr.t.back()) / lambda;
        out.lhs += law.weights[m] * lhs;
        out.rhs += law.weights[m] * (boundary + diss / lambda);
    }
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

SelectionResult krylov_select(const std::vector<EnsembleLaw>& candidates,
                              const std::vector<DiscountedFunctional>& chain,
                              double tie_tol) {
    if (candidates.empty()) throw std::invalid_argument("krylov_select: no candidates");
    nlohmann::json log;
    log["tie_tol"] = tie_tol;
    log["candidates"] = nlohmann::json::array();
    for (size_t c = 0; c < candidates.size(); ++c) {
        candidates[c].validate();
        nlohmann::json e;
        e["name"] = candidates[c].name;
        e["hash"] = law_hash(candidates[c]);
        log["candidates"].push_back(e);
    }

    // survivors tracked by hash so the outcome is list-order independent
    std::vector<size_t> alive(candidates.size());
    for (size_t c = 0; c < candidates.size(); ++c) alive[c] = c;
    log["rounds"] = nlohmann::json::array();
    for (const auto& J : chain) {
        std::vector<double> vals(alive.size());
        double best = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < alive.size(); ++i) {
            vals[i] = discounted_value(candidates[alive[i]], J).value;
            best = std::max(best, vals[i]);
        }
        const double cut = best - tie_tol * std::max(1.0, std::abs(best));
        std::vector<size_t> next;
        nlohmann::json round;
        round["functional"] = J.name;
        round["lambda"] = J.lambda;
        round["values"] = nlohmann::json::object();
        round["survivors"] = nlohmann::json::array();
        for (size_t i = 0; i < alive.size(); ++i) {
            round["values"][candidates[alive[i]].name] = vals[i];
            if (vals[i] >= cut) {
                next.push_back(alive[i]);
                round["survivors"].push_back(candidates[alive[i]].name);
            }
        }
        log["rounds"].push_back(round);
        alive = std::move(next);
        if (alive.size() == 1) break;
    }

    size_t chosen = alive[0];
    uint64_t chosen_hash = law_hash(candidates[chosen]);
    for (size_t i = 1; i < alive.size(); ++i) {
        const uint64_t h = law_hash(candidates[alive[i]]);
        if (h < chosen_hash) {
            chosen = alive[i];
            chosen_hash = h;
        }
    }
    log["final_choice"] = candidates[chosen].name;
    log["final_hash"] = chosen_hash;
    log["tie_break"] = alive.size() > 1 ? "hash" : "unique";

    // pairwise admissibility matrix among candidates sharing grid and datum
    nlohmann::json adm = nlohmann::json::array();
    for (size_t a = 0; a < candidates.size(); ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (size_t b = 0; b < candidates.size(); ++b) {
            try {
                row.push_back(verdict_name(admissibility_order(candidates[a], candidates[b])));
            } catch (const std::exception&) {
                row.push_back("n/a");
            }
        }
        adm.push_back(row);
    }
    log["admissibility"] = adm;

    SelectionResult out;
    out.index = int(chosen);
    out.law = candidates[chosen];
    out.decision_log = log.dump(2);
    return out;
}

std::string verdict_name(OrderVerdict v) {
    switch (v) {
        case OrderVerdict::Equal: return "equal";
        case OrderVerdict::FirstPrecedes: return "first_precedes";
        case OrderVerdict::SecondPrecedes: return "second_precedes";
        default: return "incomparable";
    }
}

OrderVerdict admissibility_order(const EnsembleLaw& P, const EnsembleLaw& Q, double frac_tol) {
    P.validate();
    Q.validate();
    check_member_datum(P.members[0], Q.members[0], "admissibility_order");
    const auto& t = P.members[0].t;
    for (const auto& tr : Q.members)
        if (tr.times() != int(t.size()))
            throw std::invalid_argument("admissibility_order: grid mismatch");
    for (size_t j = 0; j < t.size(); ++j)
        if (std::abs(Q.members[0].t[j] - t[j]) > 1e-12)
            throw std::invalid_argument("admissibility_order: grid mismatch");

    auto mean_curve = [&](const EnsembleLaw& law) {
        std::vector<double> c(t.size(), 0.0);
        for (size_t m = 0; m < law.members.size(); ++m)
            for (size_t j = 0; j < t.size(); ++j)
                c[j] += law.weights[m] *
                        (law.members[m].trace_y[j] - law.members[m].trace_y[0]);
        return c;
    };
    const std::vector<double> cp = mean_curve(P), cq = mean_curve(Q);
    double scale = 0.0;
    for (size_t j = 0; j < t.size(); ++j)
        scale = std::max({scale, std::abs(cp[j]), std::abs(cq[j])});
    const double tol = 1e-9 * (1.0 + scale);
    int viol_pq = 0, viol_qp = 0;
    for (size_t j = 0; j < t.size(); ++j) {
        if (cp[j] > cq[j] + tol) ++viol_pq;
        if (cq[j] > cp[j] + tol) ++viol_qp;
    }
    const int allow = int(frac_tol * double(t.size()));
    const bool p_le_q = viol_pq <= allow;
    const bool q_le_p = viol_qp <= allow;
    if (p_le_q && q_le_p) return OrderVerdict::Equal;
    if (p_le_q) return OrderVerdict::FirstPrecedes;
    if (q_le_p) return OrderVerdict::SecondPrecedes;
    return OrderVerdict::Incomparable;
}

VerificationReport restart_consistency_test(const std::vector<RestartSample>& statistics,
                                            int min_samples, double p_floor) {
    VerificationReport rep;
    for (const auto& s : statistics) {
        CheckResult c;
        c.name = "restart:" + s.name;
        const int n1 = int(s.continued.size()), n2 = int(s.fresh.size());
        if (n1 < min_samples || n2 < min_samples) {
            c.degenerate = true;
            c.note = "underpowered: need >= " + std::to_string(min_samples) +
                     " per side, have " + std::to_string(n1) + "/" + std::to_string(n2);
            rep.checks.push_back(std::move(c));
            continue;
        }
        auto mean = [](const std::vector<double>& v) {
            double m = 0.0;
            for (double x : v) m += x;
            return m / double(v.size());
        };
        auto var = [](const std::vector<double>& v, double m) {
            double acc = 0.0;
            for (double x : v) acc += (x - m) * (x - m);
            return acc / double(v.size() - 1);
        };
        const double m1 = mean(s.continued), m2 = mean(s.fresh);
        const double se = std::sqrt(var(s.continued, m1) / n1 + var(s.fresh, m2) / n2);
        if (se == 0.0) {
            // deterministic samples: distributions must coincide exactly
            c.p_value = (m1 == m2) ? 1.0 : 0.0;
            c.note = "zero-variance branch";
        } else {
            c.p_value = std::erfc(std::abs(m1 - m2) / se / std::sqrt(2.0));
        }
        c.pass = c.p_value > p_floor;
        c.margin = c.p_value - p_floor;
        rep.checks.push_back(std::move(c));
    }
    if (rep.checks.empty()) {
        CheckResult c;
        c.name = "restart:statistics";
        c.degenerate = true;
        c.note = "no statistics supplied";
        rep.checks.push_back(std::move(c));
    }
    return rep;
}

}  // namespace euler
