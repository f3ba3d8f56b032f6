#include "qscat/series.hpp"

#include <sstream>

namespace qscat {

TorusMonomial monomial_mul(const GradedLattice& lat, const TorusMonomial& a, const TorusMonomial& b) {
    if (a.exp.size() != b.exp.size()) throw input_error("monomial dimension mismatch");
    TorusMonomial r;
    r.exp = add(a.exp, b.exp);
    r.coeff = a.coeff * b.coeff * QRational::s_power(lat.form_scaled(a.exp, b.exp), lat.scale);
    return r;
}

QRational Series::coeff(const VecZ& e, uint64_t u) const {
    auto it = terms.find(SKey{e, u});
    if (it == terms.end()) return QRational(QQ(0));
    return it->second;
}

long Series::max_rel_degree() const {
    long m = 0;
    for (const auto& [k, c] : terms) m = std::max(m, d_deg(k.e) - d_deg(base));
    return m;
}

void Series::add_term(const GradedLattice& lat, const VecZ& e, uint64_t u, const QRational& c) {
    if (c.is_zero()) return;
    VecZ rel = qscat::sub(e, base);
    if (!lat.in_Nplus0(rel))
        throw std::logic_error("series term " + qscat::to_string(e) + " not above base " +
                               qscat::to_string(base));
    if (d_deg(rel) > order) return;  // truncated away
    SKey k{e, u};
    auto it = terms.find(k);
    if (it == terms.end()) {
        terms.emplace(std::move(k), c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

Series series_zero(const GradedLattice& lat, const VecZ& base, long order) {
    Series s;
    s.base = base;
    s.order = order;
    return s;
}

Series series_monomial(const GradedLattice& lat, const VecZ& e, const QRational& c, long order,
                       uint64_t u) {
    Series s = series_zero(lat, e, order);
    s.add_term(lat, e, u, c);
    return s;
}

Series series_one(const GradedLattice& lat, long order) {
    VecZ zero(static_cast<size_t>(lat.rank), 0);
    return series_monomial(lat, zero, QRational(QQ(1), lat.scale), order);
}

Series add(const GradedLattice& lat, const Series& a, const Series& b) {
    if (a.base != b.base) throw std::logic_error("series base mismatch in add");
    Series r = series_zero(lat, a.base, std::min(a.order, b.order));
    for (const auto& [k, c] : a.terms)
        if (d_deg(k.e) - d_deg(r.base) <= r.order) r.add_term(lat, k.e, k.u, c);
    for (const auto& [k, c] : b.terms)
        if (d_deg(k.e) - d_deg(r.base) <= r.order) r.add_term(lat, k.e, k.u, c);
    return r;
}

Series sub(const GradedLattice& lat, const Series& a, const Series& b) {
    return add(lat, a, scalar_mul(b, QRational(QQ(-1), lat.scale)));
}

Series scalar_mul(const Series& a, const QRational& c) {
    Series r = a;
    if (c.is_zero()) {
        r.terms.clear();
        return r;
    }
    for (auto& [k, v] : r.terms) v *= c;
    return r;
}

Series mul(const GradedLattice& lat, const Series& a, const Series& b) {
    Series r = series_zero(lat, add(a.base, b.base), std::min(a.order, b.order));
    for (const auto& [ka, ca] : a.terms) {
        long da = d_deg(ka.e) - d_deg(a.base);
        for (const auto& [kb, cb] : b.terms) {
            if (ka.u & kb.u) continue;  // u^2 = 0
            long db = d_deg(kb.e) - d_deg(b.base);
            if (da + db > r.order) continue;
            QRational c = ca * cb * QRational::s_power(lat.form_scaled(ka.e, kb.e), lat.scale);
            r.add_term(lat, add(ka.e, kb.e), ka.u | kb.u, c);
        }
    }
    return r;
}

Series inverse(const GradedLattice& lat, const Series& a) {
    // a = c z^base u0 (1 + X) with X of positive relative degree
    auto lead = a.terms.find(SKey{a.base, 0});
    if (lead == a.terms.end()) throw std::logic_error("series inverse needs an invertible leading term");
    QRational c = lead->second;
    VecZ negbase(a.base.size());
    for (size_t i = 0; i < a.base.size(); ++i) negbase[i] = -a.base[i];
    // X = c^{-1} z^{-base} * a - 1 (no commutation factor: W(base, base) = 0)
    QRational cb = c.inverse();
    Series x = mul(lat, series_monomial(lat, negbase, cb, a.order), a);
    Series one = series_one(lat, a.order);
    x = sub(lat, x, one);
    // (1+X)^{-1} = sum (-X)^j
    Series acc = one;
    Series pw = one;
    for (long j = 1; j <= a.order && !pw.is_zero(); ++j) {
        pw = mul(lat, pw, x);
        acc = add(lat, acc, scalar_mul(pw, QRational(QQ(j % 2 ? -1 : 1), lat.scale)));
        if (pw.is_zero()) break;
    }
    // a^{-1} = (1+X)^{-1} c^{-1} z^{-base} with the same commutation factor
    return mul(lat, acc, series_monomial(lat, negbase, cb, a.order));
}

Series exp_series(const GradedLattice& lat, const Series& x) {
    if (!is_zero(x.base)) throw std::logic_error("exp needs base 0");
    if (x.terms.count(SKey{x.base, 0})) throw std::logic_error("exp needs zero constant term");
    Series acc = series_one(lat, x.order);
    Series pw = series_one(lat, x.order);
    QQ fact = 1;
    for (long j = 1; j <= x.order && !pw.is_zero(); ++j) {
        pw = mul(lat, pw, x);
        fact *= j;
        acc = add(lat, acc, scalar_mul(pw, QRational(QQ(1) / fact, lat.scale)));
    }
    return acc;
}

Series log_series(const GradedLattice& lat, const Series& g) {
    if (!is_zero(g.base)) throw std::logic_error("log needs base 0");
    QRational c = g.coeff(g.base, 0);
    if (!c.is_one()) throw std::logic_error("log needs constant term 1");
    Series x = sub(lat, g, series_one(lat, g.order));
    Series acc = series_zero(lat, g.base, g.order);
    Series pw = series_one(lat, g.order);
    for (long j = 1; j <= g.order && !pw.is_zero(); ++j) {
        pw = mul(lat, pw, x);
        QQ c2 = QQ(j % 2 ? 1 : -1) / QQ(j);
        acc = add(lat, acc, scalar_mul(pw, QRational(c2, lat.scale)));
    }
    return acc;
}

bool series_equal(const Series& a, const Series& b) {
    if (a.terms.size() != b.terms.size()) return false;
    auto ita = a.terms.begin();
    auto itb = b.terms.begin();
    for (; ita != a.terms.end(); ++ita, ++itb) {
        if (!(ita->first == itb->first)) return false;
        if (ita->second != itb->second) return false;
    }
    return true;
}

std::map<SKey, QQ> classical_terms(const Series& a) {
    std::map<SKey, QQ> out;
    for (const auto& [k, c] : a.terms) {
        QQ v = classical_limit(c);
        if (v != 0) out.emplace(k, v);
    }
    return out;
}

std::string to_string(const Series& a) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : a.terms) {
        if (!first) os << "  +  ";
        first = false;
        os << "(" << c.to_string() << ") z^" << qscat::to_string(k.e);
        if (k.u) os << " u[" << std::hex << k.u << std::dec << "]";
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace qscat
