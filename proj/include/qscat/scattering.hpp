#pragma once

#include <cstdint>

#include "qscat/polyhedron.hpp"
#include "qscat/rng.hpp"
#include "qscat/series.hpp"

namespace qscat {

/// Support of a wall: the carrier hyperplane <normal, x> = offset cut by
/// half-space conditions.  normal is the primitive exponent direction in N^+.
struct WallSupport {
    VecZ normal;
    QQ offset;
    std::vector<LinCond> cuts;

    HPoly to_poly(int rank) const;
};

/// Log-form wall: log g = sum_w logfn[w] zhat^{w * exp_dir}.
struct Wall {
    WallSupport support;
    VecZ exp_dir;                     // primitive, in N^+
    std::map<long, QRational> logfn;  // level -> zhat coefficient
};

/// Perturbed-stage wall with function 1 + coeff * zhat^exponent * u_{index}.
struct NilpotentWall {
    WallSupport support;
    VecZ exponent;  // in N^+
    QRational coeff;
    uint64_t index_mask = 0;
    int parent1 = -1, parent2 = -1;  // indices into the owning diagram
    int birth_round = 0;
};

enum class DiagramKind { standard, perturbed };

struct ScatteringDiagram {
    GradedLattice lat;
    long order = 0;
    DiagramKind kind = DiagramKind::standard;
    std::vector<Wall> walls;
    std::vector<NilpotentWall> nwalls;

    size_t wall_count() const {
        return kind == DiagramKind::standard ? walls.size() : nwalls.size();
    }
};

bool wall_incoming(const GradedLattice& lat, const WallSupport& s, const VecZ& exp_dir);

/// Standard initial diagram: one incoming hyperplane wall per unfrozen index
/// with levels R_{w,d_i;q}.
ScatteringDiagram initial_diagram(const GradedLattice& lat, long order);

/// Group element of a wall crossing (sign = +-1) as a truncated series.
Series wall_group_element(const GradedLattice& lat, const Wall& w, int sign, long order);
Series wall_group_element(const GradedLattice& lat, const NilpotentWall& w, int sign, long order);

/// Coefficients A_k of Ad(g^sign): z^v -> sum_k A_k z^{v + k n'}, where the
/// dependence on v is through W(v, n') only.
std::vector<QRational> crossing_coefficients(const GradedLattice& lat, const Wall& w, int sign,
                                             const QQ& form_v_dir, long kmax);

/// Ad(g^sign) applied to a single series term.
void cross_term(const GradedLattice& lat, const ScatteringDiagram& diag, size_t wall_index,
                int sign, const SKey& key, const QRational& coeff, Series& out);

struct PathSpec {
    std::vector<VecQ> points;  // polyline, endpoints off Supp, avoids joints
};

/// Path-ordered product applied to an input series, crossing walls in order.
Series path_ordered_product(const ScatteringDiagram& diag, const PathSpec& path, const Series& in);
Series path_ordered_product(const ScatteringDiagram& diag, const PathSpec& path,
                            const TorusMonomial& m, long order);

/// A generic point on a joint cell together with the walls through it.
struct JointSite {
    VecQ point;
    HPoly cell;  // the codimension-2 cell the point is interior to
    std::vector<size_t> walls;
};

std::vector<JointSite> joint_sites(const ScatteringDiagram& diag, Rng& rng);

struct ConsistencyIssue {
    VecQ joint_point;
    Series residual_log;  // nonzero graded terms of log of the loop product
};

struct ConsistencyReport {
    bool pass = true;
    std::vector<ConsistencyIssue> issues;
};

/// Exact consistency check: composes the germ loop at every joint site and
/// requires log = 0 up to the given order.
ConsistencyReport check_consistency(const ScatteringDiagram& diag, long order, Rng& rng);

/// Order-by-order completion by cancelling joint defects with outgoing walls
/// (the production `scatter` engine, and the independent oracle for the
/// perturbation route).  Input walls must be cones or translated cones.
ScatteringDiagram complete_direct(const ScatteringDiagram& diag_in, long order, Rng& rng);

/// Loop product (as a group element) around a joint site, for diagnostics.
Series joint_loop_product(const ScatteringDiagram& diag, const JointSite& site, long order,
                          Rng& rng);

/// Canonical ordering of walls; applied before output so runs are reproducible.
void sort_walls(ScatteringDiagram& diag);

/// Merge standard walls with identical (support, direction); drop zero walls.
void merge_parallel_walls(ScatteringDiagram& diag);

}  // namespace qscat
