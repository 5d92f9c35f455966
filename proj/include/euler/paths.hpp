#pragma once
// Path-space functionals: Hölder and Sobolev-Slobodeckij norms, Young and
// Ito integrals, the reconstructed compensated martingale, and the two
// path-norm stopping times.

#include <functional>
#include <vector>

#include "euler/field.hpp"
#include "euler/noise.hpp"

namespace euler {

// a scalar path sampled on a (uniform) time grid
struct ScalarPath {
    std::vector<double> t;
    std::vector<double> v;
};

// ---- path seminorms ---------------------------------------------------------
// `dist(i,j)` returns the state-space norm of f(t_i) - f(t_j).  All pairs are
// used up to kMaxAllPairs points; larger paths are subsampled to dyadic lags.

inline constexpr int kMaxAllPairs = 2048;

double holder_seminorm(const std::vector<double>& t,
                       const std::function<double(int, int)>& dist, double alpha);
double holder_seminorm(const ScalarPath& f, double alpha);
// path of field snapshots measured in the Sobolev H^s norm
double holder_seminorm(const std::vector<double>& t,
                       const std::vector<SpectralVelocity>& f, double s, double alpha);

// W^{alpha,p} norm: (int |f|^p + int int |f(t)-f(s)|^p / |t-s|^{1+alpha p})^{1/p}
double sobolev_slobodeckij_norm(const std::vector<double>& t,
                                const std::function<double(int, int)>& dist,
                                const std::function<double(int)>& vnorm, double alpha,
                                double p);
double sobolev_slobodeckij_norm(const ScalarPath& f, double alpha, double p);

// ---- Young integration -------------------------------------------------------

struct YoungResult {
    double value = 0.0;
    ScalarPath path;                       // running integral on the finest grid
    std::vector<double> level_correction;  // |S_m - S_{m-1}|
    std::vector<double> max_remainder;     // max local sewing defect per level
    double remainder_slope = 0.0;          // log2 regression slope of max_remainder
    bool converged = false;
};

// int_a^b g df for callable paths, dyadic refinement with a trapezoid germ;
// requires alpha + beta > 1 (declared regularity of g and f)
YoungResult young_integral(const std::function<double(double)>& g,
                           const std::function<double(double)>& f, double a, double b,
                           double alpha, double beta, double tol = 1e-9,
                           int max_level = 24, bool left_point = false);

// grid paths: compound sums on dyadic coarsenings of the grid, finest = grid.
// left_point selects the Ito-consistent germ g(s) f_{st} instead of the
// trapezoid germ.
YoungResult young_integral(const ScalarPath& g, const ScalarPath& f, double alpha,
                           double beta, double tol = 1e-9, bool left_point = false);

// ---- Ito integrals -------------------------------------------------------------

// left-point sum of <h(t_j), GB(t_{j+1}) - GB(t_j)> for an adapted field path
ScalarPath ito_integral(const std::vector<SpectralVelocity>& h, const WienerPath& b);
// constant integrand
ScalarPath ito_integral(const SpectralVelocity& h, const WienerPath& b);
// iterated integral int <GB, G dB> (left-point)
ScalarPath iterated_integral(const WienerPath& b);

// ---- compensated martingale reconstruction --------------------------------------
// Mbar(t) = 1/2 ||x(t)||^2 - 1/2 ||x(0)||^2 - (1/2 - 1/l) (t ^ TL) ||G||^2
//           - int < x(0) - P div(y(s) - y(0)), G db(s) >      (left-point germ)

ScalarPath mbar_reconstruct(const SpectralVelocity& x0, const std::vector<double>& xnorm_sq,
                            const std::vector<StressGrid>& y, const WienerPath& b,
                            double one_over_l, double horizon_TL);

// ---- stopping times ---------------------------------------------------------------

struct PathStop {
    double time = 0.0;    // stopping time (grid time, capped at L and horizon)
    int index = -1;       // grid index, -1 if capped
    int which = -1;       // 0,1,2: which norm triggered; -1 if capped
    bool censored = false;  // horizon ended before both trigger and cap L
    std::array<double, 3> norms{};  // final values of the three monitored norms
};

// first time one of the three driver norms reaches L, capped at L:
//   ||GB(t)||_{H^{(3+sigma)/2}},  ||GB||_{C^{1/2-2delta} H^1}  on [0,t],
//   ||int <GB,GdB>||_{W^{beta,p}} on [0,t]
PathStop stopping_time_TL(const WienerPath& b, double L, double delta, double beta,
                          double p);

struct TauLResult {
    PathStop stop;                 // at the largest n of the schedule
    std::vector<int> schedule;     // n values
    std::vector<double> tau_n;     // per-n stopping times (thresholds L - 1/n)
};

// trajectory-observable stopping time: same norms with the reconstructed Mbar
// in place of the iterated integral, thresholds L - 1/n on the schedule
// n in {1,2,4,8,16}
TauLResult stopping_time_tauL(const ScalarPath& mbar, const WienerPath& b, double L,
                              double delta, double beta, double p);

}  // namespace euler
