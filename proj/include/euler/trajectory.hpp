#pragma once
// Time-gridded solution trajectories: velocity x, cumulative stress y with
// d/dt y = R, and the scalar energy process z, plus named scalar observable
// series.  Persistence is a directory with a JSON manifest (written last, as
// the commit marker), binary field records, and a CSV of the scalar series.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "euler/field.hpp"

namespace euler {

struct DissipativeTrajectory {
    WaveLattice lat;
    std::vector<double> t;  // output time grid

    // scalar series, one value per output time
    std::vector<double> xnorm_sq;     // ||x(t)||_{L2}^2
    std::vector<double> z;            // energy process
    std::vector<double> dissipation;  // D(t) = 2 nu int_0^t ||grad x||^2
    std::vector<double> trace_y;      // int_T3 tr y(t)

    // named auxiliary series (projections, compensators, ...), same grid
    std::map<std::string, std::vector<double>> observables;

    // field snapshots at output times (may be empty when not stored)
    std::vector<SpectralVelocity> x;
    std::vector<StressGrid> y;

    // provenance
    uint64_t seed = 0;
    double z0 = 0.0;
    std::map<std::string, double> metadata;  // l, L, K, alpha_K, ...

    int times() const { return int(t.size()); }
    void validate_sizes() const;  // throws on ragged series
};

// directory layout: manifest.json, scalars.csv, x_%04d.fld / y_%04d.fld
void save_trajectory(const std::string& dir, const DissipativeTrajectory& traj);
DissipativeTrajectory load_trajectory(const std::string& dir);

}  // namespace euler
