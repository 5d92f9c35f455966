#pragma once
// Run configuration: one flat struct covering every free parameter of the
// pipelines, a line-oriented sectioned key = value format, and validation
// that aborts naming the violated constraint.

#include <cstdint>
#include <string>
#include <vector>

namespace euler {

struct RunConfig {
    // [grid]
    int N = 8;           // lattice size, even, >= 4
    double dt = 0.005;   // time step
    double T = 0.5;      // horizon

    // [noise]
    double gamma = 4.0;       // spectral decay, > 3 + sigma/2
    double sigma = 0.5;       // regularity margin
    double c_g = 0.3;         // overall noise amplitude, >= 0 (0: no noise)
    int noise_cutoff = 2;     // |k|_inf cutoff of the stored modes

    // [solver]
    int n_cutoff = 4;           // Galerkin cutoff; viscosity 1/n unless overridden
    double nu_override = -1.0;  // >= 0 replaces 1/n

    // [parameters] regularity/stopping/selection exponents
    double delta = 0.1;    // in (0, 1/4)
    double beta = 0.375;   // in (1/2 - 2 delta + 1/p, 1/2 - delta)
    double p_exp = 20.0;   // in (1, inf)
    double alpha = 0.75;   // in (2/3, 1)
    double q_exp = 20.0;   // alpha * q > 2 and 3 alpha / 2 - 2 / q > 1
    double k_exp = 2.0;    // in (3/2, inf)
    double L = 2.0;        // stopping level, > 1
    int K = 3;             // oscillation depth, >= 0
    double eps = 0.05;     // functional time cutoff, > 0
    double lambda = 1.0;   // discount rate, > 0

    // [wild] energy-defect parameters; entries in [2, inf], "inf" accepted
    std::vector<double> l_list{2.0};

    // [run]
    uint64_t seed = 1;     // base seed, >= 1 (paths use seed, seed+1, ...)
    int ensemble = 10;     // paths per ensemble, >= 1
    std::string out = "out";
    std::string candidates;  // directory of candidate laws for selection

    // throws std::invalid_argument naming the violated constraint
    void validate() const;
};

// parse the sectioned key = value text ('#' comments, "inf" for l entries);
// unknown sections or keys are rejected
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// canonical emission; parse(emit(c)) == c
std::string emit_config(const RunConfig& c);

}  // namespace euler
