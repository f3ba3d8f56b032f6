#pragma once

#include <string>
#include <vector>

#include "qscat/rational.hpp"

namespace qscat {

/// Laurent polynomial in the formal variable s = q^(1/scale) with exact
/// rational coefficients.  Stored densely; the invariant is that the leading
/// and trailing stored coefficients are nonzero (zero polynomial has an empty
/// coefficient vector).
class QLaurent {
  public:
    QLaurent() = default;
    explicit QLaurent(const QQ& c, long scale = 1) : scale_(scale) {
        if (c != 0) coeff_.push_back(c);
    }
    // monomial c * s^e
    QLaurent(const QQ& c, long e, long scale) : lo_(e), scale_(scale) {
        if (c != 0) coeff_.push_back(c);
    }

    long scale() const { return scale_; }
    bool is_zero() const { return coeff_.empty(); }
    long lo_exp() const { return lo_; }
    long hi_exp() const { return lo_ + static_cast<long>(coeff_.size()) - 1; }
    long degree_span() const { return is_zero() ? 0 : hi_exp() - lo_exp(); }

    QQ coeff(long e) const {
        if (is_zero() || e < lo_ || e > hi_exp()) return QQ(0);
        return coeff_[static_cast<size_t>(e - lo_)];
    }
    void set_coeff(long e, const QQ& c);

    bool is_constant() const { return is_zero() || (coeff_.size() == 1 && lo_ == 0); }
    QQ constant_value() const { return coeff(0); }
    bool is_monomial() const { return coeff_.size() == 1; }

    // Re-express at a finer scale: s_old = s_new^(new/old), exponents multiply.
    QLaurent rescaled(long new_scale) const;

    QLaurent operator-() const;
    QLaurent& operator+=(const QLaurent& o);
    QLaurent& operator-=(const QLaurent& o);
    friend QLaurent operator+(QLaurent a, const QLaurent& b) { return a += b; }
    friend QLaurent operator-(QLaurent a, const QLaurent& b) { return a -= b; }
    friend QLaurent operator*(const QLaurent& a, const QLaurent& b);
    QLaurent& operator*=(const QLaurent& o) { return *this = *this * o; }
    QLaurent& mul_scalar(const QQ& c);
    QLaurent& mul_monomial(const QQ& c, long e);

    bool operator==(const QLaurent& o) const;
    bool operator!=(const QLaurent& o) const { return !(*this == o); }

    // s -> 1/s
    QLaurent inverted_variable() const;

    QQ eval_at_one() const;

    // Content (gcd of coefficients as a positive rational) of the nonzero poly.
    QQ content() const;
    QQ leading() const { return is_zero() ? QQ(0) : coeff_.back(); }

    // Exact division; throws std::logic_error if not divisible.
    QLaurent divexact(const QLaurent& d) const;

    // gcd of the underlying polynomials (unit-normalized: lowest exponent 0,
    // content 1, positive leading coefficient).  gcd(0,x) = normalized x.
    static QLaurent gcd(const QLaurent& a, const QLaurent& b);

    // The unit u = sign(lead) * content * s^lo with *this = u * primitive_part.
    QLaurent unit_part() const;

    std::string to_string() const;          // sum of "c*q^(e/D)" terms
    static QLaurent parse(const std::string& s, long scale);

    size_t hash() const;

  private:
    void trim();
    long lo_ = 0;
    std::vector<QQ> coeff_;
    long scale_ = 1;
};

// Common scale (lcm) of two values, rescaling as needed.
long common_scale(long a, long b);

}  // namespace qscat
