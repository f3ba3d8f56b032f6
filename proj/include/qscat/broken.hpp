#pragma once

#include "qscat/scattering.hpp"

namespace qscat {

/// One bend of a broken line: the wall, the level jump k (exponent gains
/// k * exp_dir for standard walls, the wall exponent for nilpotent ones),
/// and the exact bend point.
struct Bend {
    VecQ point;
    size_t wall = 0;
    long level = 1;
};

/// Geometric broken line with ends (p, Q).  Segment exponents are derived:
/// v_0 = p and each bend adds its wall step.  Coefficients are attached by
/// the quantum or classical replay.
struct BrokenLine {
    VecZ initial;
    VecQ endpoint;
    std::vector<Bend> bends;  // ordered from infinity toward Q
    VecZ final_exp;
    uint64_t umask = 0;  // union of bend index sets on perturbed diagrams

    std::vector<VecZ> segment_exponents(const ScatteringDiagram& diag) const;
};

/// All broken lines with ends (p, Q) and d(final - p) <= order.
/// Throws genericity_error when Q or a trajectory hits a joint or boundary.
std::vector<BrokenLine> enumerate_broken_lines(const ScatteringDiagram& diag, const VecZ& p,
                                               const VecQ& Q, long order);

/// Quantum coefficient of the final monomial (initial coefficient 1).
QRational line_coefficient(const ScatteringDiagram& diag, const BrokenLine& line);

/// theta_{p,Q} as a truncated series with base p; z^p when p is in ker(pi1).
Series theta(const ScatteringDiagram& diag, const VecZ& p, const VecQ& Q, long order);

/// Ordered product theta_{p_1,Q} ... theta_{p_s,Q}.
Series theta_product(const ScatteringDiagram& diag, const std::vector<VecZ>& ps, const VecQ& Q,
                     long order);

/// Coefficient of z^n in the ordered product; requires d(n - sum p_i) <= order.
QRational product_coefficient(const ScatteringDiagram& diag, const std::vector<VecZ>& ps,
                              const VecZ& n, const VecQ& Q, long order);

struct StructureConstantInfo {
    VecQ base_point;      // accepted Q
    QQ closeness;         // final approach parameter
    bool certified = false;  // two strict refinements agreed
};

/// alpha(p_1,...,p_s; n) at an auto-selected base point near pi1(n), with an
/// empirical stabilization certificate (recompute at two strictly closer
/// points).  Throws budget_error("closeness undecided") when the certificate
/// fails within the refinement budget.
QRational structure_constant(const ScatteringDiagram& diag, const std::vector<VecZ>& ps,
                             const VecZ& n, long order, Rng& rng,
                             StructureConstantInfo* info = nullptr);

/// Re-express a series relative to a deeper base point of its own support.
Series rebase(const GradedLattice& lat, const Series& s, const VecZ& new_base, long order);

/// Greedy theta-basis expansion by minimal d-degree peeling.
std::map<VecZ, QRational> expand_in_theta_basis(const ScatteringDiagram& diag, const Series& f,
                                                const VecQ& Q, long order);

/// theta_0-coefficient of the expansion.
QRational trace(const ScatteringDiagram& diag, const Series& f, const VecQ& Q, long order);

/// Quotient data for the K-graded trace: an integer projection pi_K with a
/// section (sec of a quotient vector is its lift, sec(0) = 0).
struct KSplit {
    std::vector<VecZ> proj_rows;  // quotient_rank rows of length rank
    std::vector<VecZ> sec_cols;   // lift of each quotient basis vector

    VecZ project(const VecZ& n) const;
    VecZ lift(const VecZ& nbar) const;
    bool in_K(const VecZ& n) const { return is_zero(project(n)); }
};

/// theta_0-coefficient over the subalgebra k_q[K]: the z^K-graded series
/// multiplying theta_0 in the K-relative expansion.
std::map<VecZ, QRational> trace_K(const ScatteringDiagram& diag, const Series& f, const VecQ& Q,
                                  long order, const KSplit& ks);

/// A generic base point admissible for theta computations (off supports and
/// with generic trajectories), sampled deterministically.
VecQ generic_base_point(const ScatteringDiagram& diag, Rng& rng, long span = 8);

}  // namespace qscat
