#pragma once

#include "qscat/classical.hpp"
#include "qscat/cyclotomic.hpp"
#include "qscat/tropical.hpp"

namespace qscat {

struct FrobeniusEntry {
    VecZ exponent;
    std::string lhs, rhs;
    bool match = true;
};

struct FrobeniusReport {
    bool pass = true;
    long prime = 0;        // classical check
    long root_order = 0;   // quantum check
    long cyclo_modulus = 0;  // accepted specialization q^(1/D) -> zeta_m
    long order = 0;
    std::vector<FrobeniusEntry> table;
};

/// theta_u^p == theta_{pu} coefficientwise mod p (classical engine).
FrobeniusReport classical_frobenius_check(const ScatteringDiagram& diag, const VecZ& u, long prime,
                                          const VecQ& Q, long order);

/// At a primitive k-th root (k odd): every coefficient of theta_{ku,q}
/// evaluates to the classical theta_u coefficient at the k-scaled exponent.
FrobeniusReport quantum_frobenius_check(const ScatteringDiagram& diag, const VecZ& u, long k,
                                        const VecQ& Q, long order);

/// Accepted cyclotomic modulus m: q = zeta_m^D and each q^(1/d_i) primitive
/// k-th roots of unity.  Throws input_error when none exists in the search
/// window (or k is even).
long frobenius_root_modulus(const GradedLattice& lat, long k);

/// Tropical side of the quantum theorem: every tree contributing to the
/// coefficient sum with a nonzero value at the root has all edge weights
/// divisible by k.  Returns the number of surviving trees.
struct FrobeniusTreeScan {
    long surviving = 0;
    bool all_divisible = true;
};
FrobeniusTreeScan frobenius_tree_scan(const GradedLattice& lat, const VecZ& u, long k,
                                      const VecQ& Q, long order, uint64_t seed);

}  // namespace qscat
