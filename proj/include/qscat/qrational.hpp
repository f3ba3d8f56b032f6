#pragma once

#include <string>

#include "qscat/laurent.hpp"

namespace qscat {

/// Reduced fraction of Laurent polynomials in q^(1/D).  Canonical form:
/// num/den coprime, den an ordinary polynomial with nonzero constant term,
/// content 1 and positive leading coefficient.  Equality is then syntactic.
class QRational {
  public:
    QRational() : num_(QQ(0), 0, 1), den_(QQ(1), 0, 1) {}
    explicit QRational(const QQ& c, long scale = 1)
        : num_(c, 0, scale), den_(QQ(1), 0, scale) {}
    explicit QRational(const QLaurent& n) : num_(n), den_(QQ(1), 0, n.scale()) {}
    QRational(const QLaurent& n, const QLaurent& d);

    static QRational s_power(long e, long scale) {  // q^(e/scale)
        return QRational(QLaurent(QQ(1), e, scale));
    }
    static QRational q_power(const QQ& w, long scale);  // q^w, scale*w integral

    const QLaurent& num() const { return num_; }
    const QLaurent& den() const { return den_; }
    long scale() const { return num_.scale(); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const;
    bool is_polynomial() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    QQ constant_value() const;

    QRational operator-() const;
    QRational& operator+=(const QRational& o);
    QRational& operator-=(const QRational& o);
    QRational& operator*=(const QRational& o);
    QRational& operator/=(const QRational& o);
    friend QRational operator+(QRational a, const QRational& b) { return a += b; }
    friend QRational operator-(QRational a, const QRational& b) { return a -= b; }
    friend QRational operator*(QRational a, const QRational& b) { return a *= b; }
    friend QRational operator/(QRational a, const QRational& b) { return a /= b; }
    QRational inverse() const;
    QRational pow(long k) const;
    QRational& mul_scalar(const QQ& c);

    bool operator==(const QRational& o) const;
    bool operator!=(const QRational& o) const { return !(*this == o); }

    // q^(1/D) -> q^(-1/D)
    QRational bar() const { return QRational(num_.inverted_variable(), den_.inverted_variable()); }

    std::string to_string() const;  // "num/den"
    static QRational parse(const std::string& s, long scale);

  private:
    void reduce();
    QLaurent num_, den_;
};

/// Quantum integer [w]_q = (q^w - q^-w)/(q - q^-1); requires scale*w integral.
QRational qnum(const QQ& w, long scale);

/// R_{w,d;q} = (-1)^(w-1) / (w [w/d]_q)
QRational level_coefficient(long w, const QQ& d, long scale);

/// Value at q^(1/D) = 1; throws regularity_error on a pole after reduction.
QQ classical_limit(const QRational& x);

}  // namespace qscat
