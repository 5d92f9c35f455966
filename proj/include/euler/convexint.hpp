#pragma once
// Finite-depth convex-integration engine.
//
// A subsolution is a pair (v, H) on a time grid with the pressure-eliminated
// transport identity
//   (v_{j+1} - v_j)/h + P div H_j = 0   (P the Leray projection; gradient
// parts of div H are absorbed into the pressure and never tested),
//   div v_j = 0 spectrally, H_j traceless symmetric nodewise,
// and a strict pointwise margin  e(v + GB, H) < e(t) - delta  under the
// functional e(w,H) = (3/2) lambda_max(w (x) w - H).
//
// Oscillation steps add exactly divergence-free curl-built waves with
// spatially varying amplitude plus the matching flux: the pointwise traceless
// part of w (x) w is absorbed, and the non-gradient remainder of its
// divergence is cancelled through an exact anti-divergence correction, so the
// projected transport identity is preserved to roundoff.  Margins are re-verified on the grid with an
// amplitude/frequency retry ladder.  Emission converts (v, H) into a
// trajectory (x, y, z) with x = v + GB, stress H + q I (q the pointwise
// largest eigenvalue, making the defect PSD with minimal trace), and the
// energy process carrying the (1/2 - 1/l) defect slope.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "euler/noise.hpp"
#include "euler/paths.hpp"
#include "euler/trajectory.hpp"

namespace euler {

// (3/2) lambda_max(w (x) w - H); H as (xx,xy,xz,yy,yz,zz), must be traceless
double e_lambda_max(const std::array<double, 3>& w, const std::array<double, 6>& h);
// nodewise values for a velocity field and stress grid
std::vector<double> e_lambda_max_field(const SpectralVelocity& u, const StressGrid& h);

struct Subsolution {
    WaveLattice lat;
    std::vector<double> t;               // uniform grid on [0, T]
    std::vector<SpectralVelocity> v;     // node values, divergence-free
    std::vector<StressGrid> H;           // interval fluxes (last entry: final node)
    std::vector<double> e;               // energy density profile per node time
    double delta = 0.0;                  // certified strict margin on the grid
    WienerPath gb;                       // stopped driver GB_L
    double T_L = 0.0;
    std::vector<int> used_rays;          // dictionary indices consumed so far
    std::map<std::string, double> log;   // measured constants and residuals

    int times() const { return int(t.size()); }
};

struct SubsolutionAudit {
    double max_pde_residual = 0.0;   // L2 norm of (v_{j+1}-v_j)/h + div H_j
    double max_divergence = 0.0;     // relative spectral divergence of v
    double max_trace = 0.0;          // nodewise |tr H|
    double min_margin = 0.0;         // min over nodes/times of e(t) - e(v+GB,H)
    bool ok(double tol_pde, double tol_div) const;
};
SubsolutionAudit subsolution_audit(const Subsolution& sub);

// zero subsolution against a stopped driver, with margin validated
Subsolution base_subsolution(const WienerPath& gb_stopped, double T_L,
                             const std::vector<double>& e_density, double delta);

// ---- admissible deterministic energy profile -------------------------------------

struct EnergyProfile {
    double e0 = 0.0;        // initial density
    double C_L = 0.0;       // decay constant estimated at level L
    double beta = 0.375;
    double delta_exp = 0.1; // the profile decays like t^{1/2 - 2 delta_exp}
    double margin = 0.0;    // delta used during the search
    double value(double t) const;
};

// search e0 so that the profile clears the sampled stopped drivers by the
// margin; C(L) is estimated from an internal fixed-seed driver ensemble
EnergyProfile admissible_energy(const NoiseCoefficient& g, const WaveLattice& lat,
                                double L, double T, double dt, double delta,
                                double e0_cap = 1e6);

// ---- oscillation steps -------------------------------------------------------------

struct StepOptions {
    double kappa = 0.9;       // fraction of the local margin converted per step
    int waves = 1;            // dictionary rays used per step (their mutual
                              // cross terms are not absorbed, so 1 is exact)
    int max_retries = 8;
    double margin_keep = 0.02;  // fraction of the current margin preserved
};

// one wave-addition step against the node profile e (density per grid time);
// frequency n is the integer oscillation index (modes n * xi)
Subsolution oscillation_step(const Subsolution& sub, const std::vector<double>& e_density,
                             int frequency, const StepOptions& opt = {});

// stopped variant: blocks vanish on [0, eps], ramp on [eps, 2 eps]; the base
// state for amplitudes is taken at eps (adapted assignment); alpha0 must be
// positive (the caller certifies the ensemble functional is below -alpha0)
Subsolution oscillation_step_at_stopping(const Subsolution& sub,
                                         const std::vector<double>& e_density, double tau,
                                         double eps, double alpha0, int frequency,
                                         const StepOptions& opt = {});

// ---- energy functionals --------------------------------------------------------------

// e_l(v)(t) = 1/2 ||v(0)||^2 + int_0^t <v+GB, G dB> + (1/2 - 1/l)(t ^ T_L) ||G||^2
// (left-point sums on the grid); one_over_l = 0 encodes l = infinity
ScalarPath energy_series_el(const Subsolution& sub, double one_over_l);
double energy_functional_el(const Subsolution& sub, double one_over_l, double t);

// Monte Carlo I functionals over a subsolution ensemble:
//   I_eps  = E int_eps^T (1/2 ||v+GB||^2 - e_l(v)) dt
//   I_tau  = E[ 1_{tau >= 2 eps} (1/2 ||v+GB||^2 - e_l(v))(tau) ]
struct IFunctionals {
    double I_eps = 0.0;
    double I_tau_eps = 0.0;
    double se_eps = 0.0;   // standard errors over the ensemble
    double se_tau = 0.0;
};
IFunctionals functionals_I(const std::vector<Subsolution>& ensemble, double eps,
                           double one_over_l, const std::vector<double>* taus = nullptr);

// ---- wild generation --------------------------------------------------------------------

struct WildOptions {
    int K = 5;                 // oscillation depth
    double one_over_l = 0.0;   // 0 = l = infinity; 0.5 = l = 2
    double L = 2.0;            // stopping level
    double delta = 0.02;       // initial margin for the energy search
    double delta_stop = 0.1;   // path-norm stopping parameters
    double beta_stop = 0.375;
    double p_stop = 20.0;
    StepOptions step{};
    double z0_override = -1.0;  // >= 0: emit with this initial energy value
    bool store_fields = true;   // keep x and y snapshots on the trajectory
};

// full pipeline: stop the driver at T_L, search the admissible profile, run
// the K-step recursion, shape the kinetic profile to e_l, and emit (x, y, z);
// when out_sub is non-null the final subsolution is copied there
DissipativeTrajectory wild_generate(const WienerPath& driver, const WildOptions& opt,
                                    Subsolution* out_sub = nullptr);

// concatenation past the trajectory stopping time: restart the viscous
// generator at (x, y, z)(tau) with fresh increments; z continuous at the seam
struct ExtendConfig {
    int n = 0;                // Galerkin cutoff for the continuation (0: N/2 - 1)
    double dt = 0.0;          // 0: reuse the wild grid spacing
    double horizon = 0.0;     // total horizon (> tau); 0: 2 * tau grid end
    uint64_t seed = 1;        // fresh increment stream
};
DissipativeTrajectory extend_beyond(const DissipativeTrajectory& wild, double tau,
                                    const NoiseCoefficient& g, const ExtendConfig& cfg);

}  // namespace euler
