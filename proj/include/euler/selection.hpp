#pragma once
// Finite-ensemble selection machinery: weighted trajectory laws, discounted
// functionals with declared bounds, iterated-argmax selection chains with a
// deterministic hash tie-break, the dissipation-based admissibility order,
// and statistical restart-consistency tests.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "euler/dissipative.hpp"
#include "euler/trajectory.hpp"

namespace euler {

// weighted finite set of trajectories standing in for a probability law;
// all members must share the initial datum exactly
struct EnsembleLaw {
    std::string name;
    std::vector<DissipativeTrajectory> members;
    std::vector<double> weights;  // nonnegative, normalized to sum 1

    // scales weights to sum 1; throws on empty members, ragged weights,
    // negative weight, zero total, or initial-datum mismatch across members
    void normalize();
    // verifies invariants without modifying (weight sum within 1e-12)
    void validate() const;
};

// order-independent-of-construction content hash (seeds, grids, scalar
// series, weights); used as the deterministic selection tie-break
uint64_t law_hash(const EnsembleLaw& law);

// bounded continuous integrand F(x,y,z)(t) evaluated through scalar series,
// discounted at rate lambda over [0, horizon]
struct DiscountedFunctional {
    std::string name;
    double lambda = 1.0;    // discount rate, > 0
    double bound = 0.0;     // declared sup bound; > 0 clips every evaluation
    double horizon = 0.0;   // 0: each member's full grid
    std::function<double(const DissipativeTrajectory&, int)> f;  // node value
};

// dictionary of clipped bounded wrappers over the stored scalar series:
//   "kinetic_energy"     -> 1/2 ||x(t)||^2
//   "neg_trace_y"        -> -int tr y(t)
//   "energy_z"           -> z(t)
//   "observable:<name>"  -> the named observable series
DiscountedFunctional make_functional(const std::string& key, double lambda,
                                     double bound, double horizon = 0.0);

struct DiscountedValue {
    double value = 0.0;       // sum_m w_m int_0^H e^{-lambda s} F ds, F linear
                              // between nodes with exact exponential weights
    double tail_bound = 0.0;  // ||F|| e^{-lambda H} / lambda beyond the horizon
};
DiscountedValue discounted_value(const EnsembleLaw& law, const DiscountedFunctional& J);

// both sides of the discounted dissipation identity
//   E int_0^T e^{-ls}(-tr y) ds
//     = -(1/l) tr y(0) + (e^{-lT}/l) E tr y(T) + (1/l) E int_0^T e^{-ls}(-tr R) ds
// (finite-horizon form, boundary term included); the gap is a quadrature
// diagnostic, zero for constant y
struct C1Identity {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;  // |lhs - rhs|
};
C1Identity energy_functional_C1(const EnsembleLaw& law, double lambda);

// iterated argmax over candidate laws: survivors of functional k within
// tie_tol (relative) proceed to functional k+1; final ties broken by the
// smallest law_hash; emits a JSON decision log
struct SelectionResult {
    int index = -1;
    EnsembleLaw law;
    std::string decision_log;
};
SelectionResult krylov_select(const std::vector<EnsembleLaw>& candidates,
                              const std::vector<DiscountedFunctional>& chain,
                              double tie_tol = 1e-6);

// partial order by mean cumulative dissipation tr y(t) - tr y(0): the smaller
// curve precedes, with at most frac_tol of grid times allowed to violate
enum class OrderVerdict { Equal, FirstPrecedes, SecondPrecedes, Incomparable };
OrderVerdict admissibility_order(const EnsembleLaw& P, const EnsembleLaw& Q,
                                 double frac_tol = 0.01);
std::string verdict_name(OrderVerdict v);

// two-sample consistency test between statistics of trajectories continued
// past a stopping time and fresh trajectories restarted from the stopped
// state; one check per named statistic, normal-approximation p-values;
// underpowered samples yield a degenerate verdict.  This validates restart
// plumbing only, not the Markov property of any continuum object.
struct RestartSample {
    std::string name;
    std::vector<double> continued;
    std::vector<double> fresh;
};
VerificationReport restart_consistency_test(const std::vector<RestartSample>& statistics,
                                            int min_samples = 30, double p_floor = 0.01);

}  // namespace euler
