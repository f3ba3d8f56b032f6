#include "qscat/laurent.hpp"

#include <algorithm>
#include <sstream>

namespace qscat {

long common_scale(long a, long b) {
    long g = gcd_long(a, b);
    return a / g * b;
}

void QLaurent::trim() {
    size_t front = 0;
    while (front < coeff_.size() && coeff_[front] == 0) ++front;
    if (front == coeff_.size()) {
        coeff_.clear();
        lo_ = 0;
        return;
    }
    size_t back = coeff_.size();
    while (back > front && coeff_[back - 1] == 0) --back;
    if (front > 0 || back < coeff_.size()) {
        std::vector<QQ> out(coeff_.begin() + front, coeff_.begin() + back);
        coeff_ = std::move(out);
        lo_ += static_cast<long>(front);
    }
}

void QLaurent::set_coeff(long e, const QQ& c) {
    if (is_zero()) {
        if (c == 0) return;
        lo_ = e;
        coeff_ = {c};
        return;
    }
    if (e < lo_) {
        coeff_.insert(coeff_.begin(), static_cast<size_t>(lo_ - e), QQ(0));
        lo_ = e;
    } else if (e > hi_exp()) {
        coeff_.resize(static_cast<size_t>(e - lo_) + 1, QQ(0));
    }
    coeff_[static_cast<size_t>(e - lo_)] = c;
    trim();
}

QLaurent QLaurent::rescaled(long new_scale) const {
    if (new_scale == scale_) return *this;
    if (new_scale % scale_ != 0)
        throw scale_error("cannot rescale Laurent polynomial from 1/" + std::to_string(scale_) +
                          " to 1/" + std::to_string(new_scale));
    long f = new_scale / scale_;
    QLaurent r;
    r.scale_ = new_scale;
    if (is_zero()) return r;
    r.lo_ = lo_ * f;
    r.coeff_.assign(static_cast<size_t>(degree_span() * f) + 1, QQ(0));
    for (size_t i = 0; i < coeff_.size(); ++i) r.coeff_[i * static_cast<size_t>(f)] = coeff_[i];
    return r;
}

QLaurent QLaurent::operator-() const {
    QLaurent r = *this;
    for (QQ& c : r.coeff_) c = -c;
    return r;
}

QLaurent& QLaurent::operator+=(const QLaurent& o) {
    if (o.is_zero()) return *this;
    long sc = common_scale(scale_, o.scale_);
    if (sc != scale_) *this = rescaled(sc);
    QLaurent rhs = (o.scale_ == sc) ? o : o.rescaled(sc);
    if (is_zero()) return *this = rhs;
    long new_lo = std::min(lo_, rhs.lo_);
    long new_hi = std::max(hi_exp(), rhs.hi_exp());
    std::vector<QQ> out(static_cast<size_t>(new_hi - new_lo) + 1, QQ(0));
    for (size_t i = 0; i < coeff_.size(); ++i) out[static_cast<size_t>(lo_ - new_lo) + i] = coeff_[i];
    for (size_t i = 0; i < rhs.coeff_.size(); ++i)
        out[static_cast<size_t>(rhs.lo_ - new_lo) + i] += rhs.coeff_[i];
    lo_ = new_lo;
    coeff_ = std::move(out);
    trim();
    return *this;
}

QLaurent& QLaurent::operator-=(const QLaurent& o) { return *this += -o; }

QLaurent operator*(const QLaurent& a, const QLaurent& b) {
    long sc = common_scale(a.scale_, b.scale_);
    if (a.scale_ != sc) return a.rescaled(sc) * b;
    if (b.scale_ != sc) return a * b.rescaled(sc);
    QLaurent r;
    r.scale_ = sc;
    if (a.is_zero() || b.is_zero()) return r;
    r.lo_ = a.lo_ + b.lo_;
    r.coeff_.assign(a.coeff_.size() + b.coeff_.size() - 1, QQ(0));
    for (size_t i = 0; i < a.coeff_.size(); ++i) {
        if (a.coeff_[i] == 0) continue;
        for (size_t j = 0; j < b.coeff_.size(); ++j) {
            if (b.coeff_[j] == 0) continue;
            r.coeff_[i + j] += a.coeff_[i] * b.coeff_[j];
        }
    }
    r.trim();
    return r;
}

QLaurent& QLaurent::mul_scalar(const QQ& c) {
    if (c == 0) {
        coeff_.clear();
        lo_ = 0;
        return *this;
    }
    for (QQ& x : coeff_) x *= c;
    return *this;
}

QLaurent& QLaurent::mul_monomial(const QQ& c, long e) {
    mul_scalar(c);
    lo_ += e;
    if (is_zero()) lo_ = 0;
    return *this;
}

bool QLaurent::operator==(const QLaurent& o) const {
    if (scale_ == o.scale_) return lo_ == o.lo_ && coeff_ == o.coeff_;
    long sc = common_scale(scale_, o.scale_);
    return rescaled(sc) == o.rescaled(sc);
}

QLaurent QLaurent::inverted_variable() const {
    QLaurent r;
    r.scale_ = scale_;
    if (is_zero()) return r;
    r.lo_ = -hi_exp();
    r.coeff_.assign(coeff_.rbegin(), coeff_.rend());
    return r;
}

QQ QLaurent::eval_at_one() const {
    QQ s = 0;
    for (const QQ& c : coeff_) s += c;
    return s;
}

QQ QLaurent::content() const {
    if (is_zero()) return QQ(0);
    ZZ num_gcd = 0, den_lcm = 1;
    for (const QQ& c : coeff_) {
        if (c == 0) continue;
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den().get_mpz_t());
    }
    QQ r(num_gcd, den_lcm);
    r.canonicalize();
    return r;
}

QLaurent QLaurent::divexact(const QLaurent& d) const {
    if (d.is_zero()) throw std::logic_error("division by zero polynomial");
    long sc = common_scale(scale_, d.scale_);
    if (scale_ != sc) return rescaled(sc).divexact(d);
    if (d.scale_ != sc) return divexact(d.rescaled(sc));
    QLaurent r;
    r.scale_ = sc;
    if (is_zero()) return r;
    // Long division of coefficient vectors, top down.
    std::vector<QQ> rem = coeff_;
    long rem_lo = lo_;
    std::vector<QQ> quot(coeff_.size(), QQ(0));
    long dn = static_cast<long>(d.coeff_.size());
    QQ dl = d.coeff_.back();
    long n = static_cast<long>(rem.size());
    while (n >= dn) {
        QQ q = rem[static_cast<size_t>(n - 1)] / dl;
        if (q != 0) {
            quot[static_cast<size_t>(n - dn)] = q;
            for (long j = 0; j < dn; ++j)
                rem[static_cast<size_t>(n - dn + j)] -= q * d.coeff_[static_cast<size_t>(j)];
        }
        --n;
        while (n >= 1 && rem[static_cast<size_t>(n - 1)] == 0) --n;
    }
    for (long j = 0; j < n; ++j)
        if (rem[static_cast<size_t>(j)] != 0) throw std::logic_error("inexact polynomial division");
    r.lo_ = rem_lo - d.lo_;
    r.coeff_ = std::move(quot);
    r.trim();
    return r;
}

QLaurent QLaurent::unit_part() const {
    if (is_zero()) return QLaurent(QQ(1), 0, scale_);
    QQ c = content();
    if (leading() < 0) c = -c;
    return QLaurent(c, lo_, scale_);
}

QLaurent QLaurent::gcd(const QLaurent& a, const QLaurent& b) {
    long sc = common_scale(a.scale_, b.scale_);
    QLaurent x = a.rescaled(sc), y = b.rescaled(sc);
    // Work with unit-normalized polynomials anchored at exponent 0.
    auto normalize = [](QLaurent& p) {
        if (!p.is_zero()) p = p.divexact(p.unit_part());
    };
    normalize(x);
    normalize(y);
    while (!y.is_zero()) {
        // remainder of x by y (monic Euclid)
        QLaurent r = x;
        long dn = static_cast<long>(y.coeff_.size());
        QQ yl = y.coeff_.back();
        while (!r.is_zero() && static_cast<long>(r.coeff_.size()) >= dn) {
            QQ q = r.coeff_.back() / yl;
            long shift = r.hi_exp() - y.hi_exp();
            QLaurent t = y;
            t.mul_monomial(q, shift);
            r -= t;
        }
        x = y;
        y = r;
        normalize(y);
    }
    normalize(x);
    if (x.is_zero()) x = QLaurent(QQ(0), 0, sc);
    return x;
}

std::string QLaurent::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (long e = hi_exp(); e >= lo_exp(); --e) {
        QQ c = coeff(e);
        if (c == 0) continue;
        if (!first) os << " + ";
        first = false;
        long g = gcd_long(e, scale_);
        long num = e / (g ? g : 1), den = scale_ / (g ? g : 1);
        if (e == 0) {
            os << qscat::to_string(c);
        } else {
            os << qscat::to_string(c) << "*q^(" << num << "/" << den << ")";
        }
    }
    return os.str();
}

QLaurent QLaurent::parse(const std::string& str, long scale) {
    QLaurent out(QQ(0), 0, scale);
    std::string s;
    for (char c : str)
        if (!isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty() || s == "0") return out;
    // split on '+' at top level (coefficients carry their own signs)
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '+' && i > start && s[i - 1] != '(' && s[i - 1] != '^') {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(s.substr(start));
    for (const std::string& term : parts) {
        if (term.empty()) throw input_error("bad Laurent term in: " + str);
        size_t star = term.find("*q^(");
        QQ c;
        long e = 0;
        if (star == std::string::npos) {
            c = parse_rational(term);
        } else {
            c = parse_rational(term.substr(0, star));
            size_t close = term.rfind(')');
            if (close == std::string::npos || close < star + 4)
                throw input_error("bad exponent in Laurent term: " + term);
            QQ ex = parse_rational(term.substr(star + 4, close - star - 4));
            QQ scaled = ex * QQ(scale);
            if (!is_integer(scaled))
                throw scale_error("exponent " + qscat::to_string(ex) + " not integral at scale 1/" +
                                  std::to_string(scale));
            e = long_value(scaled);
        }
        QLaurent t(c, e, scale);
        out += t;
    }
    return out;
}

size_t QLaurent::hash() const {
    size_t h = static_cast<size_t>(lo_) * 1000003u + coeff_.size();
    for (const QQ& c : coeff_) {
        h = h * 131 + mpz_get_ui(c.get_num().get_mpz_t());
        h = h * 131 + mpz_get_ui(c.get_den().get_mpz_t());
    }
    return h;
}

}  // namespace qscat
