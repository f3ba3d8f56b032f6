#pragma once

#include "qscat/broken.hpp"
#include "qscat/perturbed.hpp"

namespace qscat {

/// Weight vector: per unfrozen slot, ascending positive weights.
struct WeightVector {
    std::vector<std::vector<long>> w;

    long total(size_t slot) const;
    long total() const;
    QQ aut() const;  // |Aut(ww)|: product of factorials of repeat groups
    bool operator<(const WeightVector& o) const { return w < o.w; }
    bool operator==(const WeightVector& o) const { return w == o.w; }
    std::string to_string() const;
};

/// R_ww = prod_{i,j} R_{w_ij, d_i; q}
QRational r_weight(const GradedLattice& lat, const WeightVector& ww);

/// The set W_{m,p}(n): weight vectors with sum_{ij} w_ij f_i + sum p_k = n.
/// Empty when n - sum(p) is not a nonnegative unfrozen vector.
std::vector<WeightVector> weight_vectors_for(const GradedLattice& lat,
                                             const std::vector<VecZ>& ps, const VecZ& n);

/// Marked tropical tree embedded in Mbar_R (ambient M coordinates).
/// Edge lifts live in N and are oriented so the root-ward direction of the
/// edge is -pi1(lift).
struct TropEdge {
    int from = -1;  // root-ward vertex
    int to = -1;    // leaf-ward vertex, -1 for unbounded edges
    VecZ lift;
    long weight = 1;    // index of the weighted tangent in Mbar
    int mark_slot = -1;  // E_{ij} marking
    int mark_j = -1;
    int mark_end = -1;  // F_k marking
};

struct TropicalTree {
    std::vector<VecQ> vertices;  // vertices[0] = Q_out
    std::vector<TropEdge> edges;
    std::vector<VecZ> root_lifts;  // one per end marking, in pp order

    std::string canonical_string() const;
};

/// Block-Goettsche multiplicity computed from the lifts: the product of
/// [|W(v1,v2)|]_q over trivalent vertices times the root ordering factor
/// q^{sum_{i<j} W(lift_i, lift_j)}.  Checks balancing and trivalence.
QRational mult_q(const GradedLattice& lat, const TropicalTree& tree);
QQ mult_classical(const GradedLattice& lat, const TropicalTree& tree);

struct RootSpec {
    bool is_line = false;
    VecQ point;            // used when is_line == false
    VecQ line_a, line_b;   // two points spanning L when is_line == true
};

/// Wall-ancestry enumeration of the marked tropical disks/curves with leaf
/// constraints given by the canonical index blocks of ww inside the perturbed
/// completed diagram.  ps are the end-leaf lifts (s >= 1 needs a point root).
std::vector<TropicalTree> enumerate_trop(const ScatteringDiagram& pert,
                                         const std::vector<VecZ>& ps, const WeightVector& ww,
                                         const RootSpec& root, long order);

/// Block-Goettsche weighted count over the enumerated trees.
QRational ntrop(const GradedLattice& lat, const ScatteringDiagram& pert,
                const std::vector<VecZ>& ps, const WeightVector& ww, const RootSpec& root,
                long order);

/// Perturbed completed diagram for tropical runs: u-copy space sized to the
/// given per-slot capacity, truncation at `order`.
ScatteringDiagram make_trop_diagram(const GradedLattice& lat, long order, long copies,
                                    uint64_t seed);

/// Coefficient of z^n in theta_{p_1,Q}...theta_{p_s,Q} computed tropically:
/// sum over ww of N^trop * R_ww / |Aut(ww)|.
QRational tropfrob_coefficient(const GradedLattice& lat, const std::vector<VecZ>& ps,
                               const VecZ& n, const VecQ& Q, long order, uint64_t seed);
QQ tropfrob_coefficient_classical(const GradedLattice& lat, const std::vector<VecZ>& ps,
                                  const VecZ& n, const VecQ& Q, long order, uint64_t seed);

/// Predicted log g_Q levels on the direction n from tropical disk counts
/// rooted on the line L.
std::map<long, QRational> scat_function_from_trop(const GradedLattice& lat, const VecZ& n,
                                                  const VecQ& line_a, const VecQ& line_b,
                                                  long order, uint64_t seed);

/// Independent rank-2 oracle: enumerate combinatorial tree types over the
/// labeled leaves and solve positions exactly.  Offsets are read from the
/// same perturbed diagram so the two enumerations face identical constraints.
std::vector<TropicalTree> enumerate_trop_bruteforce(const ScatteringDiagram& pert,
                                                    const std::vector<VecZ>& ps,
                                                    const WeightVector& ww, const RootSpec& root,
                                                    long order);

}  // namespace qscat
