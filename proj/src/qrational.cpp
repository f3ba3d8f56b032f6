#include "qscat/qrational.hpp"

namespace qscat {

QRational::QRational(const QLaurent& n, const QLaurent& d) : num_(n), den_(d) {
    if (d.is_zero()) throw std::logic_error("QRational with zero denominator");
    long sc = common_scale(n.scale(), d.scale());
    num_ = num_.rescaled(sc);
    den_ = den_.rescaled(sc);
    reduce();
}

void QRational::reduce() {
    if (num_.is_zero()) {
        den_ = QLaurent(QQ(1), 0, den_.scale());
        num_ = QLaurent(QQ(0), 0, den_.scale());
        return;
    }
    if (!den_.is_monomial()) {
        QLaurent g = QLaurent::gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = num_.divexact(g);
            den_ = den_.divexact(g);
        }
    }
    QLaurent u = den_.unit_part();
    den_ = den_.divexact(u);
    num_ = num_.divexact(u);
}

QRational QRational::q_power(const QQ& w, long scale) {
    QQ e = w * QQ(scale);
    if (!is_integer(e)) throw scale_error("q^" + qscat::to_string(w) + " not integral at scale 1/" + std::to_string(scale));
    return s_power(long_value(e), scale);
}

bool QRational::is_one() const {
    return den_.is_constant() && num_.is_constant() && num_.constant_value() == den_.constant_value() &&
           !num_.is_zero();
}

QQ QRational::constant_value() const {
    if (!is_constant()) throw std::logic_error("not a constant");
    if (num_.is_zero()) return QQ(0);
    return num_.constant_value() / den_.constant_value();
}

QRational QRational::operator-() const {
    QRational r = *this;
    r.num_ = -r.num_;
    return r;
}

QRational& QRational::operator+=(const QRational& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    if (den_ == o.den_) {
        num_ += o.num_;
        reduce();
        return *this;
    }
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ = den_ * o.den_;
    reduce();
    return *this;
}

QRational& QRational::operator-=(const QRational& o) { return *this += -o; }

QRational& QRational::operator*=(const QRational& o) {
    if (is_zero()) return *this;
    if (o.is_zero()) {
        *this = QRational(QQ(0), scale());
        return *this;
    }
    // Cross-reduce before multiplying to keep intermediate degrees low.
    QLaurent a = num_, b = den_, c = o.num_, d = o.den_;
    if (!d.is_monomial() && !a.is_constant()) {
        QLaurent g = QLaurent::gcd(a, d);
        if (!g.is_constant()) {
            a = a.divexact(g);
            d = d.divexact(g);
        }
    }
    if (!b.is_monomial() && !c.is_constant()) {
        QLaurent g = QLaurent::gcd(c, b);
        if (!g.is_constant()) {
            c = c.divexact(g);
            b = b.divexact(g);
        }
    }
    num_ = a * c;
    den_ = b * d;
    QLaurent u = den_.unit_part();
    den_ = den_.divexact(u);
    num_ = num_.divexact(u);
    return *this;
}

QRational& QRational::operator/=(const QRational& o) { return *this *= o.inverse(); }

QRational QRational::inverse() const {
    if (is_zero()) throw std::logic_error("inverse of zero");
    return QRational(den_, num_);
}

QRational QRational::pow(long k) const {
    if (k == 0) return QRational(QQ(1), scale());
    QRational base = k > 0 ? *this : inverse();
    long n = k > 0 ? k : -k;
    QRational r(QQ(1), scale());
    while (n) {
        if (n & 1) r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

QRational& QRational::mul_scalar(const QQ& c) {
    if (c == 0) {
        *this = QRational(QQ(0), scale());
        return *this;
    }
    num_.mul_scalar(c);
    return *this;
}

bool QRational::operator==(const QRational& o) const { return num_ == o.num_ && den_ == o.den_; }

std::string QRational::to_string() const {
    return num_.to_string() + " / " + den_.to_string();
}

QRational QRational::parse(const std::string& s, long scale) {
    // split at the top-level " / " between num and den
    size_t pos = s.find(" / ");
    if (pos == std::string::npos) return QRational(QLaurent::parse(s, scale));
    QLaurent n = QLaurent::parse(s.substr(0, pos), scale);
    QLaurent d = QLaurent::parse(s.substr(pos + 3), scale);
    return QRational(n, d);
}

QRational qnum(const QQ& w, long scale) {
    QQ a = w * QQ(scale);
    if (!is_integer(a)) throw scale_error("[w]_q with w=" + to_string(w) + " not integral at scale 1/" + std::to_string(scale));
    long e = long_value(a);
    if (e == 0) return QRational(QQ(0), scale);
    QLaurent num(QQ(1), e, scale);
    num += QLaurent(QQ(-1), -e, scale);
    QLaurent den(QQ(1), scale, scale);
    den += QLaurent(QQ(-1), -scale, scale);
    return QRational(num, den);
}

QRational level_coefficient(long w, const QQ& d, long scale) {
    if (w <= 0) throw input_error("level coefficient needs w >= 1");
    QRational r = qnum(QQ(w) / d, scale).inverse();
    QQ c((w % 2 == 1) ? 1 : -1, w);
    c.canonicalize();
    r.mul_scalar(c);
    return r;
}

QQ classical_limit(const QRational& x) {
    QQ d = x.den().eval_at_one();
    if (d == 0) throw regularity_error("pole at q^(1/D)=1: " + x.to_string());
    return x.num().eval_at_one() / d;
}

}  // namespace qscat
