#pragma once
// Verification of the solution contract on stored trajectories: defect
// positivity, the trace/energy compatibility checks, ensemble martingale
// statistics, relative energy, and the Gronwall envelope monitor.

#include <string>
#include <vector>

#include "euler/noise.hpp"
#include "euler/paths.hpp"
#include "euler/trajectory.hpp"

namespace euler {

struct CheckResult {
    std::string name;
    bool pass = false;
    bool degenerate = false;       // inputs too weak to decide
    double margin = 0.0;           // worst-case signed margin (>= 0 means pass)
    double p_value = -1.0;         // statistical checks only; -1 when n/a
    std::vector<double> violation_times;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    bool pass() const;
    bool degenerate() const;
};

std::string report_json(const VerificationReport& r);

// ---- defect -----------------------------------------------------------------

struct DefectSeries {
    std::vector<double> t;          // stride left endpoints
    std::vector<StressGrid> defect; // N = R - x (x) x per stride
    std::vector<double> min_eig;    // nodewise minimum eigenvalue per stride
    std::vector<double> trace;      // int tr N per stride
    bool degenerate = false;
};

// stress rate by stride differencing of the cumulative y snapshots, compared
// against x (x) x at the stride left endpoint; requires stored x and y
DefectSeries compute_defect(const DissipativeTrajectory& traj);

// ---- contract checks ----------------------------------------------------------

// trace compatibility (stride rate of int tr y <= z on all but frac_tol of
// strides) and energy compatibility (||x||^2 <= z + tol_energy everywhere);
// tol_energy < 0 selects 5 * h * (1 + sup z)
VerificationReport check_M3(const DissipativeTrajectory& traj, double tol_energy = -1.0,
                            double frac_tol = 0.01);

// ensemble martingale test on trajectories that carry proj_/comp_ series for
// the given test fields: mean within 3 SE of zero, sample variance of the
// terminal increment within var_tol of t * qv_rate, lag correlation p > 0.01
VerificationReport martingale_test(
    const std::vector<DissipativeTrajectory>& ensemble,
    const std::vector<std::pair<std::string, SpectralVelocity>>& test_fields,
    const NoiseCoefficient& g, double var_tol = 0.10);

// ---- relative energy -----------------------------------------------------------

struct RelativeEnergy {
    ScalarPath e_rel;      // 1/2 z - <x,u> + 1/2 ||u||^2
    ScalarPath kinetic;    // 1/2 ||x-u||^2
    ScalarPath defect;     // 1/2 (z - ||x||^2)
};

// both trajectories need stored x snapshots on a common grid
RelativeEnergy relative_energy(const DissipativeTrajectory& traj,
                               const DissipativeTrajectory& strong);

// sup_x |grad u(x)| per stored snapshot (Frobenius norm of the gradient)
ScalarPath gradient_sup_series(const DissipativeTrajectory& traj);

// checks e_rel(t) <= e_rel(0) exp(int_0^t c |Du|_inf) + tol, reports the
// first breach
VerificationReport gronwall_monitor(const ScalarPath& e_rel, const ScalarPath& grad_sup,
                                    double c = 2.0, double tol = 1e-12);

}  // namespace euler
