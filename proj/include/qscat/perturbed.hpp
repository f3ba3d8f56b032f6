#pragma once

#include "qscat/scattering.hpp"

namespace qscat {

/// u-variable packing: unfrozen slot s (position within lat.unfrozen()) and
/// copy j in {0,...,k-1} map to bit s*k + j.
uint64_t u_bit(int slot, long j, long k);
uint64_t u_mask_of_set(int slot, const std::vector<long>& js, long k);

struct PerturbOptions {
    long order = 4;          // k
    uint64_t seed = 1;       // offsets are drawn deterministically from this
    int resample_cap = 32;   // genericity retries
    long offset_span = 8;    // magnitude of offsets
};

/// Assigned offsets for the perturbed initial walls: key (slot, w, J-mask).
struct PerturbedSetup {
    std::map<std::tuple<int, long, uint64_t>, VecQ> offsets;
};

/// The factored, perturbed initial diagram: one nilpotent wall per
/// (unfrozen i, weight w, subset J of {1..k} with |J| = w), with coefficient
/// w! R_{w,d_i;q} and generic offset in Mbar_R.  Offsets may be pinned
/// through `pinned` (used by the tropical module to place leaf constraints).
ScatteringDiagram perturb_factor(const GradedLattice& lat, const PerturbOptions& opt,
                                 const PerturbedSetup* pinned = nullptr);

/// Pairwise completion of a perturbed diagram (rounds of child creation from
/// wall pairs with disjoint index sets meeting in codimension 2).  Verifies
/// the no-triple-overlap genericity hypothesis exactly; throws
/// genericity_error when the offsets must be resampled.
ScatteringDiagram complete_perturbed_once(const ScatteringDiagram& d0);

/// perturb_factor + complete with resampling on genericity failures.
ScatteringDiagram perturb_and_complete(const GradedLattice& lat, const PerturbOptions& opt,
                                       const PerturbedSetup* pinned = nullptr);

/// Supports replaced by their recession cones; offsets dropped.
ScatteringDiagram asymptotic(const ScatteringDiagram& d);

/// Collapse an asymptotic completed perturbed diagram back to a standard one:
/// walls grouped by (cone, exponent); the level coefficient is recovered from
/// the canonical index-set fiber divided by prod_i (n_i)!.
ScatteringDiagram collapse(const ScatteringDiagram& d);

/// Leaves of a wall (indices of ancestor walls without parents).
std::vector<size_t> wall_leaves(const ScatteringDiagram& d, size_t wall);

}  // namespace qscat
