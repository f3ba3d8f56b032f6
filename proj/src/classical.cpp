#include "qscat/classical.hpp"

namespace qscat {

ClassicalDiagram classical_limit_diagram(const ScatteringDiagram& diag) {
    ClassicalDiagram cd;
    cd.diag = &diag;
    if (diag.kind == DiagramKind::standard) {
        for (const Wall& w : diag.walls) {
            std::map<long, QQ> lev;
            for (const auto& [k, b] : w.logfn) {
                QQ v = classical_limit(b);
                if (v != 0) lev[k] = v;
            }
            cd.levels.push_back(std::move(lev));
        }
    } else {
        for (const NilpotentWall& w : diag.nwalls) cd.ncoeff.push_back(classical_limit(w.coeff));
    }
    return cd;
}

std::vector<QQ> classical_crossing_coefficients(const ClassicalDiagram& cd, size_t wall,
                                                const QQ& form_v_dir, long kmax) {
    // exp(c * L(x)) with L = sum_w w l_w x^w and c = W(v, n'); for the standard
    // dilogarithm walls this is the binomial rule (1 + x)^{d c}.
    const std::map<long, QQ>& lev = cd.levels[wall];
    std::vector<QQ> L(static_cast<size_t>(kmax) + 1, QQ(0));
    for (const auto& [w, l] : lev)
        if (w <= kmax) L[static_cast<size_t>(w)] = QQ(w) * l * form_v_dir;
    std::vector<QQ> c(static_cast<size_t>(kmax) + 1, QQ(0));
    c[0] = 1;
    for (long m = 1; m <= kmax; ++m) {
        QQ acc = 0;
        for (long w = 1; w <= m; ++w)
            if (L[static_cast<size_t>(w)] != 0)
                acc += QQ(w) * L[static_cast<size_t>(w)] * c[static_cast<size_t>(m - w)];
        c[static_cast<size_t>(m)] = acc / m;
    }
    return c;
}

QQ classical_line_coefficient(const ClassicalDiagram& cd, const BrokenLine& line) {
    const ScatteringDiagram& diag = *cd.diag;
    const GradedLattice& lat = diag.lat;
    QQ c = 1;
    VecZ v = line.initial;
    for (const Bend& b : line.bends) {
        if (diag.kind == DiagramKind::standard) {
            const Wall& w = diag.walls[b.wall];
            // bends act through Ad(g)^{sign W(v,n')}: the pairing enters by its
            // absolute value (positive binomials for the dilogarithm walls)
            QQ wv = abs(lat.form(v, w.exp_dir));
            std::vector<QQ> a = classical_crossing_coefficients(cd, b.wall, wv, b.level);
            c *= a[static_cast<size_t>(b.level)];
            v = add(v, scale(w.exp_dir, b.level));
        } else {
            const NilpotentWall& w = diag.nwalls[b.wall];
            QQ wv = lat.form(v, w.exponent);
            c *= abs(wv) * cd.ncoeff[b.wall];
            v = add(v, w.exponent);
        }
    }
    return c;
}

std::map<VecZ, QQ> theta_classical(const ClassicalDiagram& cd, const VecZ& p, const VecQ& Q,
                                   long order) {
    const ScatteringDiagram& diag = *cd.diag;
    std::map<VecZ, QQ> out;
    if (diag.lat.in_ker_pi1(p)) {
        out[p] = 1;
        return out;
    }
    for (const BrokenLine& l : enumerate_broken_lines(diag, p, Q, order)) {
        QQ c = classical_line_coefficient(cd, l);
        if (c == 0) continue;
        out[l.final_exp] += c;
        if (out[l.final_exp] == 0) out.erase(l.final_exp);
    }
    return out;
}

std::map<VecZ, QQ> theta_product_classical(const ClassicalDiagram& cd,
                                           const std::vector<VecZ>& ps, const VecQ& Q,
                                           long order) {
    const GradedLattice& lat = cd.diag->lat;
    VecZ base(static_cast<size_t>(lat.rank), 0);
    std::map<VecZ, QQ> acc;
    acc[base] = 1;
    VecZ total = base;
    for (const VecZ& p : ps) {
        std::map<VecZ, QQ> th = theta_classical(cd, p, Q, order);
        total = add(total, p);
        std::map<VecZ, QQ> next;
        for (const auto& [ea, ca] : acc)
            for (const auto& [eb, cb] : th) {
                VecZ e = add(ea, eb);
                if (d_deg(e) - d_deg(total) > order) continue;
                next[e] += ca * cb;
                if (next[e] == 0) next.erase(e);
            }
        acc = std::move(next);
    }
    return acc;
}

}  // namespace qscat
