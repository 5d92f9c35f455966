#pragma once
// Viscous spectral stepping with additive noise: semi-implicit integrating
// factor on the dissipative term, explicit dealiased nonlinearity, explicit
// noise increments.  The energy process z is accumulated with the same
// increments the solver consumes, so the energy audit is an identity up to
// scheme error.

#include <cstdint>
#include <string>
#include <vector>

#include "euler/noise.hpp"
#include "euler/trajectory.hpp"

namespace euler {

// thrown when the state becomes nonfinite; carries the step index
struct NumericAbort : std::runtime_error {
    int step;
    explicit NumericAbort(int s)
        : std::runtime_error("nonfinite state at step " + std::to_string(s)), step(s) {}
};

struct SolverConfig {
    WaveLattice lat{8};
    int n = 4;              // mode cutoff; viscosity defaults to 1/n
    double nu_override = -1.0;  // >= 0 replaces 1/n
    double dt = 1e-3;
    double T = 1.0;
    double c_cfl = 0.5;
    NoiseCoefficient noise{};  // default-constructed: no modes, zero noise
    uint64_t seed = 0;
    SpectralVelocity u0;    // empty -> zero initial data
    double z0 = -1.0;       // < 0 -> ||u0||^2
    int output_stride = 10;
    bool store_x = false;
    bool store_y = false;
    // named test fields: records series proj_<name> = <x(t), e> and the
    // drift compensator comp_<name> = int_0^t <P div(u (x) u), e> ds
    std::vector<std::pair<std::string, SpectralVelocity>> test_fields;

    double viscosity() const { return nu_override >= 0.0 ? nu_override : 1.0 / n; }
    // throws std::invalid_argument naming the violated constraint
    void validate() const;
};

struct GalerkinState {
    SpectralVelocity u;
    double t = 0.0;
    double z = 0.0;
    double dissipation = 0.0;
    StressGrid y;
    int step = 0;
    // running drift compensators, one per configured test field
    std::vector<double> compensators;
};

// one Euler-Maruyama step; returns the dealiased stress used for the drift
// so callers can reuse it for bookkeeping
void galerkin_step(GalerkinState& s, const SolverConfig& cfg);

DissipativeTrajectory simulate(const SolverConfig& cfg);

struct SweepResult {
    std::vector<int> n_values;
    std::vector<DissipativeTrajectory> trajectories;
    std::vector<double> sup_xnorm_sq;  // per n: sup_t ||x||^2
    std::vector<double> sup_z;         // per n: sup_t z
};

// shared seed and noise across the cutoff list
SweepResult vanishing_viscosity_sweep(const SolverConfig& base, const std::vector<int>& n_list);

}  // namespace euler
