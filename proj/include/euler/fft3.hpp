#pragma once
// Thin wrapper around FFTW complex-to-complex 3D transforms with cached
// plans.  Plan creation is serialized (FFTW planning is not thread-safe);
// execution uses the new-array interface and is safe from parallel regions.

#include <complex>
#include <vector>

namespace euler {

// in-place forward DFT (sum with e^{-ik.x}) of a complex cube of edge n
void dft3(std::vector<std::complex<double>>& a, int n);
// in-place inverse DFT (sum with e^{+ik.x}), NOT normalized by n^3
void idft3(std::vector<std::complex<double>>& a, int n);

}  // namespace euler
