#pragma once

#include <map>
#include <optional>
#include <set>

#include "qscat/qrational.hpp"

namespace qscat {

/// Lattice N with basis {f_i}, frozen subset, skew form and multipliers.
/// Vectors are stored in f-basis coordinates; points of M_R in the dual basis,
/// so the pairing <n, x> is the plain dot product.
struct GradedLattice {
    int rank = 0;
    std::set<int> frozen;                // 0-based indices
    std::vector<VecQ> skew;              // skew[i][j] = W(f_i, f_j)
    std::map<int, QQ> multipliers;       // d_i > 0 (required for unfrozen i on use)
    long scale = 1;                      // D: D*W integral, num(d_i) | D

    bool is_frozen(int i) const { return frozen.count(i) > 0; }
    std::vector<int> unfrozen() const;
    const QQ& multiplier(int i) const;

    QQ form(const VecZ& a, const VecZ& b) const;    // W(a, b)
    long form_scaled(const VecZ& a, const VecZ& b) const;  // D*W(a,b), exact integer

    // W(n, .) as a point/covector of M_Q in dual coordinates.
    VecQ pi1(const VecZ& n) const;

    bool in_Nplus(const VecZ& n) const;      // nonneg on unfrozen, zero on frozen, nonzero
    bool in_Nplus0(const VecZ& n) const;     // N^+ or 0
    bool in_ker_pi1(const VecZ& n) const;

    void validate() const;
};

/// d(sum a_i f_i) = sum a_i
long d_deg(const VecZ& n);

/// gcd of the coordinates; index of a nonzero vector.
long vec_index(const VecZ& v);
VecZ primitive_part(const VecZ& v);

/// Builds a lattice, computing the session scale from the form and multipliers.
GradedLattice make_lattice(int rank, const std::vector<VecQ>& skew,
                           const std::map<int, QQ>& multipliers,
                           const std::set<int>& frozen = {});

/// The image lattice Mbar = pi1(N) with an integral basis, lifts, and maps.
struct ImageLattice {
    int rank = 0;                     // rank of Mbar
    int ambient = 0;                  // rank of the ambient lattice
    std::vector<VecQ> basis;          // basis covectors in M_Q (dual coordinates)
    std::vector<VecZ> lifts;          // lift[i] in N with pi1(lift[i]) = basis[i]
    std::vector<VecQ> induced_form;   // Wbar on the basis: Wbar[i][j] = W(lift_i, lift_j)

    // Mbar-coordinates of pi1(n); exact integers.
    VecZ forward(const GradedLattice& lat, const VecZ& n) const;
    // Mbar-coordinates of a rational covector known to lie in Mbar_Q.
    VecQ forward_q(const GradedLattice& lat, const VecQ& covector) const;
    // covector in M_Q from Mbar coordinates
    VecQ embed(const VecQ& mbar) const;
};

ImageLattice image_lattice(const GradedLattice& lat);

/// Monoid P from a cone containing N^+; default is the span of the unfrozen
/// basis rays together with +-f_i for frozen i.
struct MonoidSpec {
    std::vector<VecZ> generators;

    static MonoidSpec standard(const GradedLattice& lat);
    bool contains(const VecZ& n) const;          // n in P
    bool invertible(const GradedLattice& lat, const VecZ& n) const;
    bool in_ideal(const GradedLattice& lat, const VecZ& n) const;   // n in I = P \ P^x
    bool in_k_ideal(const GradedLattice& lat, const VecZ& n, long k) const;  // n in k*I
};

/// Row Hermite normal form: returns H (echelon, nonzero rows first) and a
/// unimodular T with T*A = H.
struct HnfResult {
    std::vector<std::vector<ZZ>> H;
    std::vector<std::vector<ZZ>> T;
    int rank = 0;
};
HnfResult hnf_rows(std::vector<std::vector<ZZ>> A);

}  // namespace qscat
