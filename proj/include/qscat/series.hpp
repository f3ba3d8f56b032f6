#pragma once

#include <cstdint>
#include <map>

#include "qscat/lattice.hpp"

namespace qscat {

/// Exponent key of a series term: lattice exponent plus a square-free monomial
/// in the perturbation variables u_(i,j), packed as a bitmask (u^2 = 0).
struct SKey {
    VecZ e;
    uint64_t u = 0;
    bool operator<(const SKey& o) const { return e != o.e ? e < o.e : u < o.u; }
    bool operator==(const SKey& o) const { return e == o.e && u == o.u; }
};

/// coeff * z^exp over the quantum torus; the monomial type of the coefficient ring.
struct TorusMonomial {
    QRational coeff;
    VecZ exp;
};

TorusMonomial monomial_mul(const GradedLattice& lat, const TorusMonomial& a, const TorusMonomial& b);

/// Truncated element of the (perturbed) quantum torus algebra: finitely many
/// terms c z^e u_S with e - base in N^+ u {0} and d(e - base) <= order.
struct Series {
    VecZ base;
    long order = 0;
    std::map<SKey, QRational> terms;

    bool is_zero() const { return terms.empty(); }
    QRational coeff(const VecZ& e, uint64_t u = 0) const;
    void add_term(const GradedLattice& lat, const VecZ& e, uint64_t u, const QRational& c);
    long max_rel_degree() const;
};

Series series_zero(const GradedLattice& lat, const VecZ& base, long order);
Series series_monomial(const GradedLattice& lat, const VecZ& e, const QRational& c, long order,
                       uint64_t u = 0);
Series series_one(const GradedLattice& lat, long order);

Series add(const GradedLattice& lat, const Series& a, const Series& b);
Series sub(const GradedLattice& lat, const Series& a, const Series& b);
Series mul(const GradedLattice& lat, const Series& a, const Series& b);
Series scalar_mul(const Series& a, const QRational& c);

/// Inverse of a series with invertible leading monomial at its base.
Series inverse(const GradedLattice& lat, const Series& a);

/// exp/log for base-0 series: exp needs zero constant term, log needs constant 1.
Series exp_series(const GradedLattice& lat, const Series& x);
Series log_series(const GradedLattice& lat, const Series& g);

bool series_equal(const Series& a, const Series& b);

/// The classical limit taken termwise; throws regularity_error on a pole.
std::map<SKey, QQ> classical_terms(const Series& a);

std::string to_string(const Series& a);

}  // namespace qscat
