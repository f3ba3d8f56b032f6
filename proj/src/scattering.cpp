#include "qscat/scattering.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "qscat/parallel.hpp"

namespace qscat {

namespace {
int g_max_threads = 0;  // 0: decide from OpenMP
}

int max_threads() {
#ifdef _OPENMP
    if (g_max_threads <= 0) return omp_get_max_threads();
    return g_max_threads;
#else
    return 1;
#endif
}

void set_max_threads(int n) { g_max_threads = n; }

HPoly WallSupport::to_poly(int rank) const {
    HPoly p = HPoly::whole(rank);
    VecQ nq(normal.size());
    for (size_t i = 0; i < normal.size(); ++i) nq[i] = QQ(normal[i]);
    p.add_eq(std::move(nq), offset);
    for (const LinCond& c : cuts) p.ge.push_back(c);
    return p;
}

bool wall_incoming(const GradedLattice& lat, const WallSupport& s, const VecZ& exp_dir) {
    // incoming iff pi1(n') lies in the recession cone of the support
    VecQ dir = lat.pi1(exp_dir);
    return s.to_poly(lat.rank).recession().contains(dir);
}

ScatteringDiagram initial_diagram(const GradedLattice& lat, long order) {
    ScatteringDiagram d;
    d.lat = lat;
    d.order = order;
    d.kind = DiagramKind::standard;
    for (int i : lat.unfrozen()) {
        const QQ& di = lat.multiplier(i);
        Wall w;
        w.exp_dir.assign(static_cast<size_t>(lat.rank), 0);
        w.exp_dir[static_cast<size_t>(i)] = 1;
        w.support.normal = w.exp_dir;
        w.support.offset = 0;
        for (long lev = 1; lev <= order; ++lev)
            w.logfn[lev] = level_coefficient(lev, di, lat.scale);
        d.walls.push_back(std::move(w));
    }
    sort_walls(d);
    return d;
}

namespace {

QRational zhat_unit(const GradedLattice& lat) {  // 1/(q - q^-1)
    QLaurent den(QQ(1), lat.scale, lat.scale);
    den += QLaurent(QQ(-1), -lat.scale, lat.scale);
    return QRational(den).inverse();
}

// Coefficients of exp(sum_w l_w x^w) in the commutative one-variable algebra.
std::vector<QRational> exp_one_var(const GradedLattice& lat, const std::map<long, QRational>& lev,
                                   int sign, long kmax) {
    QRational uhat = zhat_unit(lat);
    std::vector<QRational> l(static_cast<size_t>(kmax) + 1, QRational(QQ(0), lat.scale));
    for (const auto& [w, b] : lev) {
        if (w > kmax) continue;
        l[static_cast<size_t>(w)] = b * uhat;
        if (sign < 0) l[static_cast<size_t>(w)] = -l[static_cast<size_t>(w)];
    }
    std::vector<QRational> c(static_cast<size_t>(kmax) + 1, QRational(QQ(0), lat.scale));
    c[0] = QRational(QQ(1), lat.scale);
    for (long m = 1; m <= kmax; ++m) {
        QRational acc(QQ(0), lat.scale);
        for (long w = 1; w <= m; ++w) {
            if (l[static_cast<size_t>(w)].is_zero()) continue;
            QRational t = l[static_cast<size_t>(w)] * c[static_cast<size_t>(m - w)];
            t.mul_scalar(QQ(w));
            acc += t;
        }
        acc.mul_scalar(QQ(1, m));
        c[static_cast<size_t>(m)] = acc;
    }
    return c;
}

}  // namespace

Series wall_group_element(const GradedLattice& lat, const Wall& w, int sign, long order) {
    long dirdeg = d_deg(w.exp_dir);
    long kmax = dirdeg > 0 ? order / dirdeg : 0;
    std::vector<QRational> c = exp_one_var(lat, w.logfn, sign, kmax);
    Series s = series_one(lat, order);
    for (long m = 1; m <= kmax; ++m)
        s.add_term(lat, scale(w.exp_dir, m), 0, c[static_cast<size_t>(m)]);
    return s;
}

Series wall_group_element(const GradedLattice& lat, const NilpotentWall& w, int sign, long order) {
    Series s = series_one(lat, order);
    QRational c = w.coeff * zhat_unit(lat);
    if (sign < 0) c = -c;
    s.add_term(lat, w.exponent, w.index_mask, c);
    return s;
}

std::vector<QRational> crossing_coefficients(const GradedLattice& lat, const Wall& w, int sign,
                                             const QQ& form_v_dir, long kmax) {
    std::vector<QRational> fwd = exp_one_var(lat, w.logfn, sign, kmax);
    std::vector<QRational> bwd = exp_one_var(lat, w.logfn, -sign, kmax);
    QQ se = form_v_dir * QQ(lat.scale);
    long e = long_value(se);  // q^{W(v,n')} = s^e
    std::vector<QRational> a(static_cast<size_t>(kmax) + 1, QRational(QQ(0), lat.scale));
    for (long k = 0; k <= kmax; ++k) {
        QRational acc(QQ(0), lat.scale);
        for (long i = 0; i <= k; ++i) {
            long j = k - i;
            if (bwd[static_cast<size_t>(i)].is_zero() || fwd[static_cast<size_t>(j)].is_zero())
                continue;
            acc += bwd[static_cast<size_t>(i)] * fwd[static_cast<size_t>(j)] *
                   QRational::s_power((j - i) * e, lat.scale);
        }
        a[static_cast<size_t>(k)] = acc;
    }
    return a;
}

void cross_term(const GradedLattice& lat, const ScatteringDiagram& diag, size_t wall_index,
                int sign, const SKey& key, const QRational& coeff, Series& out) {
    if (diag.kind == DiagramKind::standard) {
        const Wall& w = diag.walls[wall_index];
        long dirdeg = d_deg(w.exp_dir);
        long room = out.order - (d_deg(key.e) - d_deg(out.base));
        long kmax = dirdeg > 0 ? room / dirdeg : 0;
        if (kmax < 0) return;
        std::vector<QRational> a =
            crossing_coefficients(lat, w, sign, lat.form(key.e, w.exp_dir), kmax);
        for (long k = 0; k <= kmax; ++k) {
            if (a[static_cast<size_t>(k)].is_zero()) continue;
            out.add_term(lat, add(key.e, scale(w.exp_dir, k)), key.u,
                         coeff * a[static_cast<size_t>(k)]);
        }
    } else {
        const NilpotentWall& w = diag.nwalls[wall_index];
        out.add_term(lat, key.e, key.u, coeff);
        if (key.u & w.index_mask) return;  // u^2 = 0
        QRational bracket = qnum(lat.form(key.e, w.exponent), lat.scale);
        if (bracket.is_zero()) return;
        if (sign < 0) bracket = -bracket;
        out.add_term(lat, add(key.e, w.exponent), key.u | w.index_mask, coeff * bracket * w.coeff);
    }
}

namespace {

struct Crossing {
    QQ t;
    size_t wall;
    int sign;
};

const WallSupport& support_of(const ScatteringDiagram& d, size_t i) {
    return d.kind == DiagramKind::standard ? d.walls[i].support : d.nwalls[i].support;
}

// crossings of the open segment (p0, p1); throws on non-generic incidences
std::vector<Crossing> segment_crossings(const ScatteringDiagram& diag, const VecQ& p0,
                                        const VecQ& p1) {
    std::vector<Crossing> out;
    VecQ dirv = sub(p1, p0);
    for (size_t i = 0; i < diag.wall_count(); ++i) {
        const WallSupport& s = support_of(diag, i);
        QQ v0 = dot(s.normal, p0) - s.offset;
        QQ vd = dot(s.normal, dirv);
        if (vd == 0) {
            if (v0 == 0) {
                HPoly sp = s.to_poly(static_cast<int>(p0.size()));
                if (sp.contains(p0) || sp.contains(p1))
                    throw genericity_error("path segment lies inside a wall");
            }
            continue;
        }
        QQ t = -v0 / vd;
        if (t <= 0 || t >= 1) {
            if (t == 0 || t == 1) {
                VecQ x = add(p0, scale(dirv, t));
                if (s.to_poly(static_cast<int>(p0.size())).contains(x))
                    throw input_error("path endpoint lies on a wall support");
            }
            continue;
        }
        VecQ x = add(p0, scale(dirv, t));
        HPoly sp = s.to_poly(static_cast<int>(p0.size()));
        if (!sp.contains(x)) continue;
        if (!sp.active_at(x).empty())
            throw genericity_error("path crosses a wall on its boundary (joint)");
        int sgn = vd > 0 ? -1 : 1;  // sign <n, -gamma'>
        out.push_back({t, i, sgn});
    }
    std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.wall < b.wall;
    });
    for (size_t i = 1; i < out.size(); ++i) {
        if (out[i].t == out[i - 1].t) {
            const VecZ& n1 = support_of(diag, out[i].wall).normal;
            const VecZ& n2 = support_of(diag, out[i - 1].wall).normal;
            if (!(n1 == n2 || n1 == scale(n2, -1)))
                throw genericity_error("path passes through a joint of two walls");
        }
    }
    return out;
}

Series apply_crossing(const GradedLattice& lat, const ScatteringDiagram& diag, size_t wall,
                      int sign, const Series& in) {
    Series out = series_zero(lat, in.base, in.order);
    for (const auto& [k, c] : in.terms) cross_term(lat, diag, wall, sign, k, c, out);
    return out;
}

}  // namespace

Series path_ordered_product(const ScatteringDiagram& diag, const PathSpec& path, const Series& in) {
    if (path.points.size() < 2) return in;
    Series cur = in;
    for (size_t s = 0; s + 1 < path.points.size(); ++s) {
        std::vector<Crossing> xs = segment_crossings(diag, path.points[s], path.points[s + 1]);
        for (const Crossing& c : xs) cur = apply_crossing(diag.lat, diag, c.wall, c.sign, cur);
    }
    return cur;
}

Series path_ordered_product(const ScatteringDiagram& diag, const PathSpec& path,
                            const TorusMonomial& m, long order) {
    Series in = series_monomial(diag.lat, m.exp, m.coeff, order);
    return path_ordered_product(diag, path, in);
}

// ---------------------------------------------------------------------------
// joints

namespace {

// hyperplane <a,x> = b properly splits p?
bool splits(const HPoly& p, const VecQ& a, const QQ& b) {
    HPoly above = p;
    above.ge.push_back({a, b, true});
    HPoly below = p;
    VecQ na = a;
    for (QQ& q : na) q = -q;
    below.ge.push_back({na, -b, true});
    auto ca = solve_equalities(above);
    if (!ca) return false;
    auto cb = solve_equalities(below);
    if (!cb) return false;
    return fm_strict_point(restrict_ineqs(above, *ca), ca->ydim()).has_value() &&
           fm_strict_point(restrict_ineqs(below, *cb), cb->ydim()).has_value();
}

}  // namespace

std::vector<JointSite> joint_sites(const ScatteringDiagram& diag, Rng& rng) {
    const GradedLattice& lat = diag.lat;
    const int r = lat.rank;
    const size_t W = diag.wall_count();
    std::vector<HPoly> supports;
    for (size_t i = 0; i < W; ++i) supports.push_back(support_of(diag, i).to_poly(r));

    std::vector<HPoly> cands;
    auto consider = [&](HPoly p) {
        if (affine_dim(p) != r - 2) return;
        cands.push_back(std::move(p));
    };
    for (size_t i = 0; i < W; ++i)
        for (size_t j = i + 1; j < W; ++j) consider(intersect(supports[i], supports[j]));
    for (size_t i = 0; i < W; ++i) {
        const WallSupport& s = support_of(diag, i);
        for (size_t c = 0; c < s.cuts.size(); ++c) {
            HPoly f = supports[i];
            f.add_eq(s.cuts[c].a, s.cuts[c].b);
            consider(std::move(f));
        }
    }

    // splitting hyperplanes: carriers and cut boundaries of every wall
    std::vector<std::pair<VecQ, QQ>> hyps;
    for (size_t i = 0; i < W; ++i) {
        const WallSupport& s = support_of(diag, i);
        VecQ nq(s.normal.size());
        for (size_t k = 0; k < s.normal.size(); ++k) nq[k] = QQ(s.normal[k]);
        hyps.emplace_back(nq, s.offset);
        for (const LinCond& c : s.cuts) hyps.emplace_back(c.a, c.b);
    }

    std::map<std::string, JointSite> dedup;
    for (const HPoly& cand : cands) {
        std::vector<HPoly> cells{cand};
        for (const auto& [a, b] : hyps) {
            std::vector<HPoly> next;
            for (HPoly& cell : cells) {
                if (splits(cell, a, b)) {
                    HPoly above = cell;
                    above.ge.push_back({a, b, true});
                    HPoly below = cell;
                    VecQ na = a;
                    for (QQ& q : na) q = -q;
                    below.ge.push_back({na, -b, true});
                    next.push_back(std::move(above));
                    next.push_back(std::move(below));
                } else {
                    next.push_back(std::move(cell));
                }
            }
            cells = std::move(next);
        }
        for (HPoly& cell : cells) {
            std::string key = poly_key(cell);
            if (dedup.count(key)) continue;
            auto x = relative_interior_point(canonical_form(cell));
            if (!x) continue;
            JointSite site;
            site.point = *x;
            site.cell = canonical_form(cell);
            for (size_t i = 0; i < W; ++i)
                if (supports[i].contains(*x)) site.walls.push_back(i);
            if (site.walls.empty()) continue;
            dedup.emplace(std::move(key), std::move(site));
        }
    }
    std::vector<JointSite> out;
    out.reserve(dedup.size());
    for (auto& [k, v] : dedup) out.push_back(std::move(v));
    return out;
}

// ---------------------------------------------------------------------------
// germ loop at a site

namespace {

struct LoopCrossing {
    VecQ delta;  // 2D direction in the transverse plane
    size_t wall;
    int sign;
};

struct Plane {
    VecQ u1, u2;
};

QQ cross2(const VecQ& a, const VecQ& b) { return a[0] * b[1] - a[1] * b[0]; }
QQ dot2(const VecQ& a, const VecQ& b) { return a[0] * b[0] + a[1] * b[1]; }

// CCW-from-d0 angular comparison
bool angle_less(const VecQ& d0, const VecQ& a, const VecQ& b) {
    auto half = [&](const VecQ& v) {
        QQ c = cross2(d0, v);
        if (c > 0) return 0;
        if (c == 0 && dot2(d0, v) > 0) return 0;
        return 1;
    };
    int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    QQ c = cross2(a, b);
    if (c != 0) return c > 0;
    return false;
}

// germ crossings of the infinitesimal CCW loop at site.point
std::vector<LoopCrossing> germ_crossings(const ScatteringDiagram& diag, const JointSite& site,
                                         const Plane& pl) {
    std::vector<LoopCrossing> out;
    for (size_t wi : site.walls) {
        const WallSupport& s = support_of(diag, wi);
        QQ n1 = dot(s.normal, pl.u1), n2 = dot(s.normal, pl.u2);
        if (n1 == 0 && n2 == 0) throw genericity_error("transverse plane parallel to a wall");
        VecQ t{-n2, n1};
        std::vector<const LinCond*> act;
        for (const LinCond& c : s.cuts)
            if (dot(c.a, site.point) == c.b) act.push_back(&c);
        for (int sgn : {1, -1}) {
            VecQ dvec{t[0] * sgn, t[1] * sgn};
            bool ok = true;
            for (const LinCond* c : act) {
                QQ v = dot(c->a, pl.u1) * dvec[0] + dot(c->a, pl.u2) * dvec[1];
                if (v < 0) ok = false;
                if (v == 0) throw genericity_error("germ ray runs inside a wall facet");
            }
            if (ok) out.push_back({dvec, wi, sgn});
        }
    }
    return out;
}

Plane pick_plane(const ScatteringDiagram& diag, const JointSite& site, Rng& rng) {
    const int r = diag.lat.rank;
    for (int attempt = 0; attempt < 64; ++attempt) {
        Plane pl{rng.generic_point(static_cast<size_t>(r), 4),
                 rng.generic_point(static_cast<size_t>(r), 4)};
        bool ok = true;
        for (size_t wi : site.walls) {
            const WallSupport& s = support_of(diag, wi);
            if (dot(s.normal, pl.u1) == 0 && dot(s.normal, pl.u2) == 0) ok = false;
        }
        if (!ok) continue;
        try {
            std::vector<LoopCrossing> xs = germ_crossings(diag, site, pl);
            for (size_t a = 0; a < xs.size() && ok; ++a)
                for (size_t b = a + 1; b < xs.size() && ok; ++b) {
                    if (cross2(xs[a].delta, xs[b].delta) == 0 &&
                        dot2(xs[a].delta, xs[b].delta) > 0) {
                        const VecZ& na = support_of(diag, xs[a].wall).normal;
                        const VecZ& nb = support_of(diag, xs[b].wall).normal;
                        if (!(na == nb || na == scale(nb, -1))) ok = false;
                    }
                }
        } catch (const genericity_error&) {
            ok = false;
        }
        if (ok) return pl;
    }
    throw budget_error("could not find a generic transverse plane at a joint");
}

VecQ pick_base_direction(const std::vector<LoopCrossing>& xs, Rng& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        VecQ d0 = rng.generic_point(2, 4);
        if (d0[0] == 0 && d0[1] == 0) continue;
        bool ok = true;
        for (const LoopCrossing& x : xs)
            if (cross2(d0, x.delta) == 0) ok = false;
        if (ok) return d0;
    }
    throw budget_error("no generic base direction for the joint loop");
}

void sort_crossings(std::vector<LoopCrossing>& xs, const VecQ& d0) {
    std::sort(xs.begin(), xs.end(), [&](const LoopCrossing& a, const LoopCrossing& b) {
        if (cross2(a.delta, b.delta) == 0 && dot2(a.delta, b.delta) > 0) return a.wall < b.wall;
        return angle_less(d0, a.delta, b.delta);
    });
}

}  // namespace

Series joint_loop_product(const ScatteringDiagram& diag, const JointSite& site, long order,
                          Rng& rng) {
    const GradedLattice& lat = diag.lat;
    Plane pl = pick_plane(diag, site, rng);
    std::vector<LoopCrossing> xs = germ_crossings(diag, site, pl);
    VecQ d0 = pick_base_direction(xs, rng);
    sort_crossings(xs, d0);
    Series prod = series_one(lat, order);
    for (const LoopCrossing& x : xs) {
        Series g = diag.kind == DiagramKind::standard
                       ? wall_group_element(lat, diag.walls[x.wall], x.sign, order)
                       : wall_group_element(lat, diag.nwalls[x.wall], x.sign, order);
        // first-crossed wall leftmost: matches sequential Ad application
        prod = mul(lat, prod, g);
    }
    return prod;
}

ConsistencyReport check_consistency(const ScatteringDiagram& diag, long order, Rng& rng) {
    std::vector<JointSite> sites = joint_sites(diag, rng);
    ConsistencyReport rep;
    std::vector<std::optional<ConsistencyIssue>> issues(sites.size());
    std::vector<uint64_t> seeds(sites.size());
    for (size_t i = 0; i < sites.size(); ++i) seeds[i] = rng.raw();
    parallel_for(sites.size(), [&](size_t i) {
        Rng local(seeds[i]);
        Series prod = joint_loop_product(diag, sites[i], order, local);
        Series lg = log_series(diag.lat, prod);
        if (!lg.is_zero()) issues[i] = ConsistencyIssue{sites[i].point, lg};
    });
    for (auto& iss : issues)
        if (iss) {
            rep.pass = false;
            rep.issues.push_back(std::move(*iss));
        }
    return rep;
}

// ---------------------------------------------------------------------------
// direct order-by-order completion

namespace {

// 2D trace direction of a ray from the site in ambient direction `dir`,
// relative to the cell hull (quotient by the hull tangent space).
VecQ trace_direction(const JointSite& site, const Plane& pl, const VecQ& dir, int rank) {
    std::vector<VecQ> indep;
    for (const LinCond& c : site.cell.eq) {
        std::vector<LinCond> m;
        for (const VecQ& row : indep) m.push_back({row, QQ(0), false});
        m.push_back({c.a, QQ(0), false});
        HPoly scratch = HPoly::whole(rank);
        scratch.eq = m;
        auto chart = solve_equalities(scratch);
        if (chart && rank - chart->ydim() == static_cast<int>(m.size())) indep.push_back(c.a);
        if (indep.size() == 2) break;
    }
    if (indep.size() != 2) throw std::logic_error("joint cell is not codimension 2");
    const VecQ& na = indep[0];
    const VecQ& nb = indep[1];
    QQ m11 = dot(na, pl.u1), m12 = dot(na, pl.u2);
    QQ m21 = dot(nb, pl.u1), m22 = dot(nb, pl.u2);
    QQ det = m11 * m22 - m12 * m21;
    if (det == 0) throw genericity_error("transverse plane not transverse to the joint");
    QQ r1 = dot(na, dir), r2 = dot(nb, dir);
    return VecQ{(m22 * r1 - m12 * r2) / det, (m11 * r2 - m21 * r1) / det};
}

}  // namespace

ScatteringDiagram complete_direct(const ScatteringDiagram& diag_in, long order, Rng& rng) {
    if (diag_in.kind != DiagramKind::standard)
        throw input_error("direct completion expects a standard diagram");
    ScatteringDiagram d = diag_in;
    d.order = order;
    const GradedLattice& lat = d.lat;
    QLaurent qmqi(QQ(1), lat.scale, lat.scale);
    qmqi += QLaurent(QQ(-1), -lat.scale, lat.scale);
    QRational qdiff{qmqi};  // q - q^-1

    for (long ord = 2; ord <= order; ++ord) {
        for (int pass = 0;; ++pass) {
            if (pass >= 64)
                throw budget_error("direct completion did not stabilize at order " +
                                   std::to_string(ord));
            std::vector<JointSite> sites = joint_sites(d, rng);
            struct NewWall {
                WallSupport support;
                VecZ dir;
                long level;
                QRational coeff;
            };
            std::vector<std::vector<NewWall>> found(sites.size());
            std::vector<uint64_t> seeds(sites.size());
            for (size_t i = 0; i < sites.size(); ++i) seeds[i] = rng.raw();
            std::vector<std::string> failures(sites.size());
            parallel_for(sites.size(), [&](size_t si) {
                try {
                    Rng local(seeds[si]);
                    const JointSite& site = sites[si];
                    Plane pl = pick_plane(d, site, local);
                    std::vector<LoopCrossing> xs = germ_crossings(d, site, pl);
                    VecQ d0 = pick_base_direction(xs, local);
                    sort_crossings(xs, d0);
                    Series prod = series_one(lat, ord);
                    for (const LoopCrossing& x : xs) {
                        Series g = wall_group_element(lat, d.walls[x.wall], x.sign, ord);
                        prod = mul(lat, prod, g);
                    }
                    Series lg = log_series(lat, prod);
                    for (const auto& [key, cz] : lg.terms) {
                        long deg = d_deg(key.e);
                        if (deg < ord)
                            throw std::logic_error("defect below current order at " +
                                                   qscat::to_string(site.point));
                        if (deg > ord) continue;
                        VecQ raydir = scale(lat.pi1(key.e), QQ(-1));
                        if (qscat::is_zero(raydir))
                            throw genericity_error("central defect exponent " +
                                                   qscat::to_string(key.e));
                        VecQ delta = trace_direction(site, pl, raydir, lat.rank);
                        if (delta[0] == 0 && delta[1] == 0)
                            throw genericity_error("defect direction parallel to the joint");
                        VecZ ndir = primitive_part(key.e);
                        QQ n1 = dot(ndir, pl.u1), n2 = dot(ndir, pl.u2);
                        VecQ t{-n2, n1};
                        if (cross2(delta, t) != 0)
                            throw std::logic_error("defect ray not on its own trace line");
                        QQ along = dot2(delta, t);
                        if (along == 0) throw std::logic_error("degenerate defect trace");
                        int eps = along > 0 ? 1 : -1;
                        NewWall nw;
                        nw.dir = ndir;
                        nw.level = vec_index(key.e);
                        nw.coeff = -(cz * qdiff);
                        if (eps < 0) nw.coeff = -nw.coeff;
                        HPoly sup = extrude(site.cell, raydir);
                        nw.support.normal = ndir;
                        nw.support.offset = dot(ndir, site.point);
                        for (const LinCond& c : sup.ge) nw.support.cuts.push_back(c);
                        found[si].push_back(std::move(nw));
                    }
                } catch (const std::exception& e) {
                    failures[si] = e.what();
                }
            });
            for (const std::string& f : failures)
                if (!f.empty()) throw budget_error("completion failure: " + f);
            size_t added = 0;
            for (const auto& batch : found)
                for (const NewWall& nw : batch) {
                    ++added;
                    bool merged = false;
                    HPoly npoly = nw.support.to_poly(lat.rank);
                    for (Wall& w : d.walls) {
                        if (w.exp_dir != nw.dir) continue;
                        if (!same_polyhedron(w.support.to_poly(lat.rank), npoly)) continue;
                        auto it = w.logfn.find(nw.level);
                        if (it == w.logfn.end())
                            w.logfn[nw.level] = nw.coeff;
                        else {
                            it->second += nw.coeff;
                            if (it->second.is_zero()) w.logfn.erase(it);
                        }
                        merged = true;
                        break;
                    }
                    if (!merged) {
                        Wall w;
                        w.support = nw.support;
                        w.exp_dir = nw.dir;
                        w.logfn[nw.level] = nw.coeff;
                        d.walls.push_back(std::move(w));
                    }
                }
            d.walls.erase(std::remove_if(d.walls.begin(), d.walls.end(),
                                         [](const Wall& w) { return w.logfn.empty(); }),
                          d.walls.end());
            if (added == 0) break;
        }
    }
    merge_parallel_walls(d);
    sort_walls(d);
    return d;
}

// ---------------------------------------------------------------------------

namespace {
std::string wall_key(const GradedLattice& lat, const Wall& w) {
    return to_string(w.exp_dir) + "|" + poly_key(w.support.to_poly(lat.rank));
}
}  // namespace

void merge_parallel_walls(ScatteringDiagram& diag) {
    if (diag.kind != DiagramKind::standard) return;
    std::map<std::string, Wall> merged;
    for (Wall& w : diag.walls) {
        std::string key = wall_key(diag.lat, w);
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(std::move(key), std::move(w));
            continue;
        }
        for (const auto& [lev, c] : w.logfn) {
            auto jt = it->second.logfn.find(lev);
            if (jt == it->second.logfn.end())
                it->second.logfn[lev] = c;
            else {
                jt->second += c;
                if (jt->second.is_zero()) it->second.logfn.erase(jt);
            }
        }
    }
    diag.walls.clear();
    for (auto& [k, w] : merged)
        if (!w.logfn.empty()) diag.walls.push_back(std::move(w));
}

void sort_walls(ScatteringDiagram& diag) {
    if (diag.kind == DiagramKind::standard) {
        std::sort(diag.walls.begin(), diag.walls.end(), [&](const Wall& a, const Wall& b) {
            if (a.exp_dir != b.exp_dir) return a.exp_dir < b.exp_dir;
            return wall_key(diag.lat, a) < wall_key(diag.lat, b);
        });
    }
    // perturbed diagrams keep creation order: parents refer to indices
}

}  // namespace qscat
