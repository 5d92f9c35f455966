#pragma once
// Straight-line serial reference implementations of the parallel kernels.
// These favor obviousness over speed (the physical-space evaluator is a
// direct O(N^6) mode sum, no FFT) and serve as oracles in the unit tests
// and as the baseline in the kernel benchmark.

#include "euler/field.hpp"

namespace euler::serial_ref {

void leray_project(SpectralVelocity& u);
double sobolev_norm(const SpectralVelocity& u, double s);
double trace_integral(const StressGrid& r);
// u(x_j) by direct summation of all modes (no transform)
VectorGrid to_physical_direct(const SpectralVelocity& u);
// u (x) u from the direct evaluator, dealiased input
StressGrid nonlinear_stress(const SpectralVelocity& u);

}  // namespace euler::serial_ref
