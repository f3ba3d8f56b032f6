#pragma once

#include <optional>

#include "qscat/rational.hpp"

namespace qscat {

/// One linear condition <a, x> (cmp) b.
struct LinCond {
    VecQ a;
    QQ b;
    bool strict = false;  // only meaningful for inequalities
};

/// H-representation of a convex rational polyhedron in M_R coordinates:
/// equalities <a,x> = b and inequalities <a,x> >= b.
struct HPoly {
    int dim = 0;
    std::vector<LinCond> eq;
    std::vector<LinCond> ge;

    static HPoly whole(int dim) { return HPoly{dim, {}, {}}; }
    void add_eq(VecQ a, QQ b) { eq.push_back({std::move(a), std::move(b), false}); }
    void add_ge(VecQ a, QQ b) { ge.push_back({std::move(a), std::move(b), false}); }

    bool contains(const VecQ& x) const;
    // indices of inequalities active (tight) at x; x assumed contained
    std::vector<int> active_at(const VecQ& x) const;

    // zero all right-hand sides: the recession cone / asymptotic support
    HPoly recession() const;
    // translate by t: {x + t : x in P}
    HPoly translated(const VecQ& t) const;
};

/// Affine parametrization x = x0 + V y of the solution set of the equalities.
struct AffineChart {
    VecQ x0;
    std::vector<VecQ> basis;  // columns V_j
    int ydim() const { return static_cast<int>(basis.size()); }
    VecQ point(const VecQ& y) const;
};

/// Solve the equalities of P exactly. nullopt if inconsistent.
std::optional<AffineChart> solve_equalities(const HPoly& p);

/// Inequalities of P pulled back to chart coordinates.
std::vector<LinCond> restrict_ineqs(const HPoly& p, const AffineChart& chart);

/// Fourier-Motzkin feasibility of a system of inequalities (with strict flags)
/// in y-space of the given dimension.
bool fm_feasible(std::vector<LinCond> sys, int ydim);

/// A point satisfying every inequality strictly (nullopt if none exists).
std::optional<VecQ> fm_strict_point(const std::vector<LinCond>& sys, int ydim);

/// Relative-interior point of P: satisfies equalities and all inequalities
/// strictly. nullopt when P has empty relative interior in its affine hull
/// (i.e. some inequality is an implicit equality) or is empty.
std::optional<VecQ> relative_interior_point(const HPoly& p);

/// True when P is nonempty.
bool nonempty(const HPoly& p);

/// Affine dimension of the hull of P (-1 for empty). Exact.
int affine_dim(const HPoly& p);

/// {x : exists t >= 0 with x - t v in P}  (extrusion by the ray R_{>=0} v).
HPoly extrude(const HPoly& p, const VecQ& v);

/// Intersection (concatenates conditions).
HPoly intersect(const HPoly& a, const HPoly& b);

/// Canonical minimal H-form: unique for equal polyhedra with the same affine
/// hull; used as a grouping key. Equalities in reduced echelon form with
/// primitive scaling; inequalities reduced modulo the equality row space,
/// primitively scaled, irredundant, sorted.
HPoly canonical_form(const HPoly& p);
bool same_polyhedron(const HPoly& a, const HPoly& b);
std::string poly_key(const HPoly& p);

}  // namespace qscat
