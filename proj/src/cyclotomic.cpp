#include "qscat/cyclotomic.hpp"

#include <map>
#include <sstream>

namespace qscat {

namespace {

// dense ascending polynomial helpers over QQ
using Poly = std::vector<QQ>;

void poly_trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, QQ(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    poly_trim(r);
    return r;
}

// division with remainder; q and r returned through out-params
void poly_divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
    r = a;
    poly_trim(r);
    q.assign(r.size(), QQ(0));
    while (r.size() >= b.size() && !r.empty()) {
        QQ c = r.back() / b.back();
        size_t off = r.size() - b.size();
        q[off] = c;
        for (size_t j = 0; j < b.size(); ++j) r[off + j] -= c * b[j];
        poly_trim(r);
    }
    poly_trim(q);
}

Poly poly_mod(const Poly& a, const Poly& b) {
    Poly q, r;
    poly_divmod(a, b, q, r);
    return r;
}

}  // namespace

const std::vector<QQ>& cyclotomic_poly(long m) {
    static std::map<long, Poly> cache;
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    if (m < 1) throw input_error("cyclotomic modulus must be positive");
    // x^m - 1 divided by all Phi_d, d | m, d < m
    Poly p(static_cast<size_t>(m) + 1, QQ(0));
    p[0] = -1;
    p[static_cast<size_t>(m)] = 1;
    for (long d = 1; d < m; ++d) {
        if (m % d != 0) continue;
        Poly q, r;
        poly_divmod(p, cyclotomic_poly(d), q, r);
        if (!r.empty()) throw std::logic_error("cyclotomic division not exact");
        p = q;
    }
    return cache.emplace(m, std::move(p)).first->second;
}

long cyclotomic_degree(long m) { return static_cast<long>(cyclotomic_poly(m).size()) - 1; }

CyclotomicElement::CyclotomicElement(long m, VecQ coords) : m_(m), c_(std::move(coords)) {
    size_t deg = static_cast<size_t>(cyclotomic_degree(m));
    if (c_.size() != deg) throw input_error("cyclotomic coordinate length mismatch");
}

CyclotomicElement CyclotomicElement::zero(long m) {
    return CyclotomicElement(m, VecQ(static_cast<size_t>(cyclotomic_degree(m)), QQ(0)));
}

CyclotomicElement CyclotomicElement::one(long m) {
    CyclotomicElement e = zero(m);
    if (e.c_.empty()) throw input_error("trivial cyclotomic field");
    e.c_[0] = 1;
    return e;
}

CyclotomicElement CyclotomicElement::root_power(long m, long e) {
    long r = ((e % m) + m) % m;
    Poly p(static_cast<size_t>(r) + 1, QQ(0));
    p[static_cast<size_t>(r)] = 1;
    Poly red = poly_mod(p, cyclotomic_poly(m));
    red.resize(static_cast<size_t>(cyclotomic_degree(m)), QQ(0));
    return CyclotomicElement(m, red);
}

bool CyclotomicElement::is_zero() const {
    for (const QQ& x : c_)
        if (x != 0) return false;
    return true;
}

bool CyclotomicElement::is_rational() const {
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

QQ CyclotomicElement::rational_value() const {
    if (!is_rational()) throw std::logic_error("cyclotomic element is not rational");
    return c_.empty() ? QQ(0) : c_[0];
}

CyclotomicElement CyclotomicElement::operator-() const {
    CyclotomicElement r = *this;
    for (QQ& x : r.c_) x = -x;
    return r;
}

CyclotomicElement operator+(const CyclotomicElement& a, const CyclotomicElement& b) {
    if (a.m_ != b.m_) throw input_error("cyclotomic modulus mismatch");
    CyclotomicElement r = a;
    for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
    return r;
}

CyclotomicElement operator-(const CyclotomicElement& a, const CyclotomicElement& b) { return a + (-b); }

CyclotomicElement operator*(const CyclotomicElement& a, const CyclotomicElement& b) {
    if (a.m_ != b.m_) throw input_error("cyclotomic modulus mismatch");
    Poly p = poly_mul(a.c_, b.c_);
    Poly red = poly_mod(p, cyclotomic_poly(a.m_));
    red.resize(static_cast<size_t>(cyclotomic_degree(a.m_)), QQ(0));
    return CyclotomicElement(a.m_, red);
}

CyclotomicElement CyclotomicElement::inverse() const {
    if (is_zero()) throw std::logic_error("inverse of zero cyclotomic element");
    // extended Euclid in Q[x] against Phi_m
    Poly a = c_;
    poly_trim(a);
    Poly b = cyclotomic_poly(m_);
    Poly s0 = {QQ(1)}, s1 = {};
    Poly r0 = a, r1 = b;
    while (!r1.empty()) {
        Poly q, r;
        poly_divmod(r0, r1, q, r);
        Poly s = s0;
        Poly qs = poly_mul(q, s1);
        s.resize(std::max(s.size(), qs.size()), QQ(0));
        for (size_t i = 0; i < qs.size(); ++i) s[i] -= qs[i];
        poly_trim(s);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    // r0 = gcd = s0*a mod Phi; must be a nonzero constant (Phi irreducible)
    if (r0.size() != 1) throw std::logic_error("cyclotomic inverse: gcd not constant");
    QQ inv = QQ(1) / r0[0];
    for (QQ& x : s0) x *= inv;
    Poly red = poly_mod(s0, cyclotomic_poly(m_));
    red.resize(static_cast<size_t>(cyclotomic_degree(m_)), QQ(0));
    return CyclotomicElement(m_, red);
}

bool CyclotomicElement::operator==(const CyclotomicElement& o) const { return m_ == o.m_ && c_ == o.c_; }

std::string CyclotomicElement::to_string() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < c_.size(); ++i) {
        if (i) os << ",";
        os << c_[i];
    }
    os << "] mod Phi_" << m_;
    return os.str();
}

CyclotomicElement eval_at_root(const QLaurent& p, long m) {
    CyclotomicElement r = CyclotomicElement::zero(m);
    if (p.is_zero()) return r;
    for (long e = p.lo_exp(); e <= p.hi_exp(); ++e) {
        QQ c = p.coeff(e);
        if (c == 0) continue;
        CyclotomicElement t = CyclotomicElement::root_power(m, e);
        VecQ tc = t.coords();
        for (QQ& x : tc) x *= c;
        r = r + CyclotomicElement(m, tc);
    }
    return r;
}

bool has_pole_at_root(const QRational& x, long m) {
    return eval_at_root(x.den(), m).is_zero();
}

CyclotomicElement eval_at_root(const QRational& x, long m) {
    CyclotomicElement d = eval_at_root(x.den(), m);
    if (d.is_zero())
        throw pole_error("denominator vanishes at the primitive " + std::to_string(m) +
                         "-th root of unity: " + x.to_string());
    return eval_at_root(x.num(), m) * d.inverse();
}

}  // namespace qscat
