#include "qscat/polyhedron.hpp"

#include <algorithm>
#include <sstream>

namespace qscat {

namespace {

// (a | b) rows; reduced row echelon form in place; returns pivot columns.
// A row (0...0 | b) with b != 0 yields pivot column == dim (inconsistency).
std::vector<int> rref(std::vector<LinCond>& rows, int dim) {
    std::vector<int> pivots;
    size_t r = 0;
    for (int c = 0; c <= dim && r < rows.size(); ++c) {
        size_t piv = r;
        while (piv < rows.size()) {
            const QQ& v = (c == dim) ? rows[piv].b : rows[piv].a[static_cast<size_t>(c)];
            if (v != 0) break;
            ++piv;
        }
        if (piv == rows.size()) continue;
        std::swap(rows[r], rows[piv]);
        QQ lead = (c == dim) ? rows[r].b : rows[r].a[static_cast<size_t>(c)];
        for (int j = 0; j < dim; ++j) rows[r].a[static_cast<size_t>(j)] /= lead;
        rows[r].b /= lead;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == r) continue;
            QQ f = (c == dim) ? rows[i].b : rows[i].a[static_cast<size_t>(c)];
            if (f == 0) continue;
            for (int j = 0; j < dim; ++j)
                rows[i].a[static_cast<size_t>(j)] -= f * rows[r].a[static_cast<size_t>(j)];
            rows[i].b -= f * rows[r].b;
        }
        pivots.push_back(c);
        ++r;
    }
    rows.resize(r);
    return pivots;
}

QQ eval(const LinCond& c, const VecQ& x) { return dot(c.a, x) - c.b; }

// scale (a|b) to coprime integers; keep_orientation scales by positive
// rationals only, otherwise the first nonzero entry is made positive.
void primitive_scale(LinCond& c, bool keep_orientation) {
    ZZ num_gcd = 0, den_lcm = 1;
    auto fold = [&](const QQ& x) {
        if (x == 0) return;
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), x.get_num().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), x.get_den().get_mpz_t());
    };
    for (const QQ& x : c.a) fold(x);
    fold(c.b);
    if (num_gcd == 0) return;
    QQ s(den_lcm, num_gcd);
    s.canonicalize();
    if (s < 0) s = -s;
    if (!keep_orientation) {
        QQ first = 0;
        for (const QQ& x : c.a)
            if (x != 0) {
                first = x;
                break;
            }
        if (first == 0) first = c.b;
        if (first < 0) s = -s;
    }
    for (QQ& x : c.a) x *= s;
    c.b *= s;
}

bool cond_less(const LinCond& x, const LinCond& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.strict < y.strict;
}

}  // namespace

bool HPoly::contains(const VecQ& x) const {
    for (const LinCond& c : eq)
        if (eval(c, x) != 0) return false;
    for (const LinCond& c : ge) {
        QQ v = eval(c, x);
        if (v < 0 || (c.strict && v == 0)) return false;
    }
    return true;
}

std::vector<int> HPoly::active_at(const VecQ& x) const {
    std::vector<int> out;
    for (size_t i = 0; i < ge.size(); ++i)
        if (eval(ge[i], x) == 0) out.push_back(static_cast<int>(i));
    return out;
}

HPoly HPoly::recession() const {
    HPoly r = *this;
    for (LinCond& c : r.eq) c.b = 0;
    for (LinCond& c : r.ge) c.b = 0;
    return r;
}

HPoly HPoly::translated(const VecQ& t) const {
    HPoly r = *this;
    for (LinCond& c : r.eq) c.b += dot(c.a, t);
    for (LinCond& c : r.ge) c.b += dot(c.a, t);
    return r;
}

std::optional<AffineChart> solve_equalities(const HPoly& p) {
    std::vector<LinCond> rows = p.eq;
    std::vector<int> pivots = rref(rows, p.dim);
    for (int c : pivots)
        if (c == p.dim) return std::nullopt;  // 0 = 1
    AffineChart chart;
    chart.x0.assign(static_cast<size_t>(p.dim), QQ(0));
    std::vector<bool> is_pivot(static_cast<size_t>(p.dim), false);
    for (size_t r = 0; r < rows.size(); ++r) {
        int c = pivots[r];
        is_pivot[static_cast<size_t>(c)] = true;
        chart.x0[static_cast<size_t>(c)] = rows[r].b;
    }
    for (int j = 0; j < p.dim; ++j) {
        if (is_pivot[static_cast<size_t>(j)]) continue;
        VecQ v(static_cast<size_t>(p.dim), QQ(0));
        v[static_cast<size_t>(j)] = 1;
        for (size_t r = 0; r < rows.size(); ++r)
            v[static_cast<size_t>(pivots[r])] = -rows[r].a[static_cast<size_t>(j)];
        chart.basis.push_back(std::move(v));
    }
    return chart;
}

VecQ AffineChart::point(const VecQ& y) const {
    VecQ x = x0;
    for (size_t j = 0; j < basis.size(); ++j)
        for (size_t i = 0; i < x.size(); ++i) x[i] += y[j] * basis[j][i];
    return x;
}

std::vector<LinCond> restrict_ineqs(const HPoly& p, const AffineChart& chart) {
    std::vector<LinCond> out;
    for (const LinCond& c : p.ge) {
        LinCond r;
        r.strict = c.strict;
        r.b = c.b - dot(c.a, chart.x0);
        r.a.resize(chart.basis.size());
        for (size_t j = 0; j < chart.basis.size(); ++j) r.a[j] = dot(c.a, chart.basis[j]);
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

// One step of Fourier-Motzkin: eliminate variable k.
std::vector<LinCond> fm_eliminate(const std::vector<LinCond>& sys, int k) {
    std::vector<const LinCond*> low, high, rest;
    for (const LinCond& c : sys) {
        const QQ& q = c.a[static_cast<size_t>(k)];
        if (q > 0)
            low.push_back(&c);
        else if (q < 0)
            high.push_back(&c);
        else
            rest.push_back(&c);
    }
    std::vector<LinCond> out;
    auto drop_var = [&](LinCond c) {
        c.a.erase(c.a.begin() + k);
        return c;
    };
    for (const LinCond* c : rest) out.push_back(drop_var(*c));
    for (const LinCond* lo : low)
        for (const LinCond* hi : high) {
            const QQ& ql = lo->a[static_cast<size_t>(k)];
            const QQ& qh = hi->a[static_cast<size_t>(k)];
            LinCond c;
            c.strict = lo->strict || hi->strict;
            c.a.resize(lo->a.size());
            for (size_t j = 0; j < lo->a.size(); ++j) c.a[j] = ql * hi->a[j] - qh * lo->a[j];
            c.b = ql * hi->b - qh * lo->b;
            out.push_back(drop_var(std::move(c)));
        }
    return out;
}

bool constants_ok(const std::vector<LinCond>& sys) {
    for (const LinCond& c : sys) {
        if (0 < c.b) return false;
        if (c.strict && c.b == 0) return false;
    }
    return true;
}

}  // namespace

bool fm_feasible(std::vector<LinCond> sys, int ydim) {
    for (int k = ydim - 1; k >= 0; --k) sys = fm_eliminate(sys, k);
    return constants_ok(sys);
}

std::optional<VecQ> fm_strict_point(const std::vector<LinCond>& sys0, int ydim) {
    std::vector<LinCond> sys = sys0;
    for (LinCond& c : sys) c.strict = true;
    std::vector<std::vector<LinCond>> stages(static_cast<size_t>(ydim) + 1);
    stages[static_cast<size_t>(ydim)] = sys;
    for (int k = ydim; k >= 1; --k)
        stages[static_cast<size_t>(k - 1)] = fm_eliminate(stages[static_cast<size_t>(k)], k - 1);
    if (!constants_ok(stages[0])) return std::nullopt;
    VecQ y;
    for (int k = 1; k <= ydim; ++k) {
        bool has_lo = false, has_hi = false;
        QQ lo = 0, hi = 0;
        for (const LinCond& c : stages[static_cast<size_t>(k)]) {
            const QQ& q = c.a[static_cast<size_t>(k - 1)];
            if (q == 0) continue;
            QQ rest = -c.b;
            for (int j = 0; j < k - 1; ++j)
                rest += c.a[static_cast<size_t>(j)] * y[static_cast<size_t>(j)];
            QQ bound = -rest / q;  // q*y_k + rest > 0
            if (q > 0) {
                if (!has_lo || bound > lo) lo = bound, has_lo = true;
            } else {
                if (!has_hi || bound < hi) hi = bound, has_hi = true;
            }
        }
        QQ val;
        if (has_lo && has_hi)
            val = (lo + hi) / 2;
        else if (has_lo)
            val = lo + 1;
        else if (has_hi)
            val = hi - 1;
        else
            val = 0;
        y.push_back(val);
    }
    for (const LinCond& c : sys) {
        QQ v = -c.b;
        for (int j = 0; j < ydim; ++j) v += c.a[static_cast<size_t>(j)] * y[static_cast<size_t>(j)];
        if (v <= 0) return std::nullopt;
    }
    return y;
}

std::optional<VecQ> relative_interior_point(const HPoly& p) {
    auto chart = solve_equalities(p);
    if (!chart) return std::nullopt;
    std::vector<LinCond> sys = restrict_ineqs(p, *chart);
    auto y = fm_strict_point(sys, chart->ydim());
    if (!y) return std::nullopt;
    return chart->point(*y);
}

bool nonempty(const HPoly& p) {
    auto chart = solve_equalities(p);
    if (!chart) return false;
    return fm_feasible(restrict_ineqs(p, *chart), chart->ydim());
}

namespace {

struct HullResult {
    bool empty = false;
    HPoly poly;  // implicit equalities promoted
};

HullResult affine_hull(const HPoly& p) {
    HullResult res;
    res.poly = p;
    for (;;) {
        auto chart = solve_equalities(res.poly);
        if (!chart) {
            res.empty = true;
            return res;
        }
        std::vector<LinCond> sys = restrict_ineqs(res.poly, *chart);
        if (!fm_feasible(sys, chart->ydim())) {
            res.empty = true;
            return res;
        }
        int promote = -1;
        for (size_t i = 0; i < sys.size(); ++i) {
            std::vector<LinCond> test = sys;
            test[i].strict = true;
            if (!fm_feasible(test, chart->ydim())) {
                promote = static_cast<int>(i);
                break;
            }
        }
        if (promote < 0) return res;
        LinCond c = res.poly.ge[static_cast<size_t>(promote)];
        res.poly.ge.erase(res.poly.ge.begin() + promote);
        c.strict = false;
        res.poly.eq.push_back(std::move(c));
    }
}

}  // namespace

int affine_dim(const HPoly& p) {
    HullResult h = affine_hull(p);
    if (h.empty) return -1;
    auto chart = solve_equalities(h.poly);
    return chart ? chart->ydim() : -1;
}

HPoly intersect(const HPoly& a, const HPoly& b) {
    if (a.dim != b.dim) throw input_error("polyhedron dimension mismatch");
    HPoly r = a;
    r.eq.insert(r.eq.end(), b.eq.begin(), b.eq.end());
    r.ge.insert(r.ge.end(), b.ge.begin(), b.ge.end());
    return r;
}

HPoly extrude(const HPoly& p, const VecQ& v) {
    // {x : exists t >= 0 with x - t v in P}
    HPoly out;
    out.dim = p.dim;
    int solver = -1;
    for (size_t i = 0; i < p.eq.size(); ++i)
        if (dot(p.eq[i].a, v) != 0) {
            solver = static_cast<int>(i);
            break;
        }
    if (solver >= 0) {
        const LinCond& s = p.eq[static_cast<size_t>(solver)];
        QQ cv = dot(s.a, v);
        // <a, x - t v> = b for the solver row gives t = (<a,x> - b)/cv
        auto substitute = [&](const LinCond& c) {
            LinCond r = c;
            QQ f = dot(c.a, v) / cv;
            for (size_t j = 0; j < r.a.size(); ++j) r.a[j] -= f * s.a[j];
            r.b -= f * s.b;
            return r;
        };
        for (size_t i = 0; i < p.eq.size(); ++i) {
            if (static_cast<int>(i) == solver) continue;
            out.eq.push_back(substitute(p.eq[i]));
        }
        for (const LinCond& c : p.ge) out.ge.push_back(substitute(c));
        LinCond t0;  // t >= 0
        t0.a = s.a;
        t0.b = s.b;
        if (cv < 0) {
            for (QQ& q : t0.a) q = -q;
            t0.b = -t0.b;
        }
        out.ge.push_back(std::move(t0));
        return out;
    }
    out.eq = p.eq;
    std::vector<LinCond> sys;  // variables (x..., t)
    for (const LinCond& c : p.ge) {
        LinCond r = c;
        r.a.push_back(-dot(c.a, v));
        sys.push_back(std::move(r));
    }
    LinCond tpos;
    tpos.a.assign(static_cast<size_t>(p.dim) + 1, QQ(0));
    tpos.a.back() = 1;
    tpos.b = 0;
    sys.push_back(std::move(tpos));
    std::vector<LinCond> elim = fm_eliminate(sys, p.dim);
    for (LinCond& c : elim) {
        bool triv = true;
        for (const QQ& q : c.a)
            if (q != 0) triv = false;
        if (triv && c.b <= 0) continue;
        out.ge.push_back(std::move(c));
    }
    return out;
}

HPoly canonical_form(const HPoly& p) {
    HullResult h = affine_hull(p);
    HPoly out;
    out.dim = p.dim;
    if (h.empty) {
        LinCond c;
        c.a.assign(static_cast<size_t>(p.dim), QQ(0));
        c.b = 1;
        out.eq.push_back(std::move(c));
        return out;
    }
    std::vector<LinCond> eqs = h.poly.eq;
    rref(eqs, p.dim);
    std::vector<LinCond> canon_eqs = eqs;
    for (LinCond& c : canon_eqs) primitive_scale(c, false);
    std::sort(canon_eqs.begin(), canon_eqs.end(), cond_less);
    // reduce inequalities modulo the equality row space
    std::vector<LinCond> ges;
    {
        std::vector<LinCond> rows = h.poly.eq;
        std::vector<int> pv = rref(rows, p.dim);
        for (LinCond c : h.poly.ge) {
            for (size_t r = 0; r < rows.size(); ++r) {
                int pc = pv[r];
                if (pc >= p.dim) continue;
                QQ f = c.a[static_cast<size_t>(pc)];
                if (f == 0) continue;
                for (int j = 0; j < p.dim; ++j)
                    c.a[static_cast<size_t>(j)] -= f * rows[r].a[static_cast<size_t>(j)];
                c.b -= f * rows[r].b;
            }
            bool zero = true;
            for (const QQ& q : c.a)
                if (q != 0) zero = false;
            if (zero) continue;
            c.strict = false;
            primitive_scale(c, true);
            ges.push_back(std::move(c));
        }
    }
    std::sort(ges.begin(), ges.end(), cond_less);
    ges.erase(std::unique(ges.begin(), ges.end(),
                          [](const LinCond& x, const LinCond& y) { return x.a == y.a && x.b == y.b; }),
              ges.end());
    for (size_t i = 0; i < ges.size();) {
        HPoly test;
        test.dim = p.dim;
        test.eq = canon_eqs;
        for (size_t j = 0; j < ges.size(); ++j)
            if (j != i) test.ge.push_back(ges[j]);
        LinCond neg = ges[i];
        for (QQ& q : neg.a) q = -q;
        neg.b = -neg.b;
        neg.strict = true;
        test.ge.push_back(std::move(neg));
        auto chart = solve_equalities(test);
        bool redundant = !chart || !fm_feasible(restrict_ineqs(test, *chart), chart->ydim());
        if (redundant)
            ges.erase(ges.begin() + static_cast<long>(i));
        else
            ++i;
    }
    out.eq = std::move(canon_eqs);
    out.ge = std::move(ges);
    return out;
}

bool same_polyhedron(const HPoly& a, const HPoly& b) {
    HPoly ca = canonical_form(a), cb = canonical_form(b);
    if (ca.eq.size() != cb.eq.size() || ca.ge.size() != cb.ge.size()) return false;
    for (size_t i = 0; i < ca.eq.size(); ++i)
        if (ca.eq[i].a != cb.eq[i].a || ca.eq[i].b != cb.eq[i].b) return false;
    for (size_t i = 0; i < ca.ge.size(); ++i)
        if (ca.ge[i].a != cb.ge[i].a || ca.ge[i].b != cb.ge[i].b) return false;
    return true;
}

std::string poly_key(const HPoly& p) {
    HPoly c = canonical_form(p);
    std::ostringstream os;
    os << "E";
    for (const LinCond& e : c.eq) os << to_string(e.a) << "=" << to_string(e.b) << ";";
    os << "I";
    for (const LinCond& g : c.ge) os << to_string(g.a) << ">=" << to_string(g.b) << ";";
    return os.str();
}

}  // namespace qscat
