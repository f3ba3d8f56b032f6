#pragma once

#include "qscat/broken.hpp"
#include "qscat/classical.hpp"

namespace qscat {

/// Seed data: fixed ambient skew form with a mutating basis.  Basis vectors
/// are stored in the coordinates of the initial seed.
struct Seed {
    int rank = 0;
    std::set<int> frozen;
    std::vector<VecQ> form;       // ambient {.,.} in initial-seed coordinates
    std::map<int, QQ> multipliers;
    std::vector<VecZ> basis;      // e_i, columns in ambient coordinates

    QQ pairing(const VecZ& a, const VecZ& b) const;  // {a, b}
    QQ epsilon(int i, int j) const;                  // d_j {e_i, e_j}
    void validate() const;
};

Seed make_seed(int rank, std::vector<VecQ> form, std::map<int, QQ> multipliers,
               std::set<int> frozen = {});

/// Basis mutation in direction j (unfrozen): e_i + [eps_ij]_+ e_j, e_j -> -e_j.
Seed mutate(const Seed& seed, int j);

/// Compatible skew form Lambda on M with Lambda(B_1(e_j), .) = e_j / d_j for
/// unfrozen j; throws input_error("not quantizable") when none exists.
std::vector<VecQ> compatible_pair(const Seed& seed);

/// The principal-coefficient seed on N + M.
Seed principal_seed(const Seed& seed);

enum class Side { X, A };

/// A scattering session attached to a seed and a side: the session lattice is
/// expressed in the f-basis (f_i = e_i for X, f_i = B_1(e_i) for A).
struct ClusterSession {
    Seed seed;
    Side side = Side::X;
    GradedLattice lat;
    std::vector<VecZ> fvec;     // f_i in ambient coordinates
    std::vector<VecQ> lambda;   // A side: the compatible pair

    VecZ to_session(const VecZ& ambient) const;
    VecZ to_ambient(const VecZ& session) const;
};

ClusterSession make_session(const Seed& seed, Side side);

/// Initial scattering diagram of the session; the A side carries the inverse
/// dilogarithm functions (negated log levels).
ScatteringDiagram cluster_initial_diagram(const ClusterSession& ses, long order);

/// Classical one-step mutation pullback acting on a monomial exponent given
/// in ambient coordinates (N for side X, M for side A); the result maps
/// ambient exponents to rational coefficients.
std::map<VecZ, QQ> classical_mutation_pullback(const Seed& seed, int j, Side side,
                                               const VecZ& ambient_exp, long order);

/// Quantum one-step mutation pullback in the session frame.
Series quantum_mutation_pullback(const ClusterSession& ses, const Seed& at_seed, int j,
                                 const VecZ& ambient_exp, long order);

/// Composite pullback of a mutation word (applied to a generator).
Series word_pullback(const ClusterSession& ses, const std::vector<int>& word,
                     const VecZ& ambient_exp, long order);

/// Strict interior point of the cluster chamber of the seed reached by `word`,
/// generic for the diagram.
VecQ chamber_point(const ClusterSession& ses, const ScatteringDiagram& diag,
                   const std::vector<int>& word, Rng& rng);

struct ChamberCheckReport {
    bool pass = true;
    std::vector<std::pair<VecZ, Series>> residuals;  // generator, difference
};

/// Path-ordered products between cluster chambers against composed quantum
/// mutation pullbacks, on every session generator.
ChamberCheckReport chamber_cluster_check(const ClusterSession& ses, const std::vector<int>& word,
                                         long order, Rng& rng);

/// Classical theta functions of the middle algebra via principal coefficients:
/// computed on the A-side session of the principal seed with K = (0, N) and
/// section m -> (m, 0), then specialized z^{(0,n)} -> 1.
struct MidTheta {
    std::map<VecZ, QQ> coeffs;                 // exponents in M
    std::map<VecZ, std::map<VecZ, QQ>> raw;    // m-part -> (n-part -> coeff)
    bool stable = false;                       // finiteness probe verdict
};

MidTheta mid_theta(const Seed& seed, const VecZ& p, long order, uint64_t sample_seed);

/// Ordered product of middle theta functions (classical, commutative).
std::map<VecZ, QQ> mid_theta_product(const Seed& seed, const std::vector<VecZ>& ps, long order,
                                     uint64_t sample_seed);

}  // namespace qscat
