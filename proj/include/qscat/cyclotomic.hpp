#pragma once

#include "qscat/qrational.hpp"

namespace qscat {

/// Element of Q[x]/Phi_m(x), coordinates in the power basis 1, x, ..., x^(phi(m)-1).
class CyclotomicElement {
  public:
    CyclotomicElement() = default;
    CyclotomicElement(long m, VecQ coords);
    static CyclotomicElement zero(long m);
    static CyclotomicElement one(long m);
    static CyclotomicElement root_power(long m, long e);  // zeta_m^e

    long modulus() const { return m_; }
    const VecQ& coords() const { return c_; }
    bool is_zero() const;
    bool is_rational() const;
    QQ rational_value() const;

    CyclotomicElement operator-() const;
    friend CyclotomicElement operator+(const CyclotomicElement& a, const CyclotomicElement& b);
    friend CyclotomicElement operator-(const CyclotomicElement& a, const CyclotomicElement& b);
    friend CyclotomicElement operator*(const CyclotomicElement& a, const CyclotomicElement& b);
    CyclotomicElement inverse() const;
    bool operator==(const CyclotomicElement& o) const;
    bool operator!=(const CyclotomicElement& o) const { return !(*this == o); }

    std::string to_string() const;

  private:
    long m_ = 1;
    VecQ c_;  // length deg Phi_m
};

/// Coefficients of the m-th cyclotomic polynomial (ascending, integer-valued).
const std::vector<QQ>& cyclotomic_poly(long m);
long cyclotomic_degree(long m);

/// Image of x under q^(1/D) -> zeta_m.  Throws pole_error if the reduced
/// denominator vanishes there.
CyclotomicElement eval_at_root(const QRational& x, long m);
CyclotomicElement eval_at_root(const QLaurent& p, long m);

/// True if Phi_m (in the variable q^(1/D)) divides the reduced denominator.
bool has_pole_at_root(const QRational& x, long m);

}  // namespace qscat
