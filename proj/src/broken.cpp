#include "qscat/broken.hpp"

#include <algorithm>
#include <functional>

#include "qscat/parallel.hpp"

namespace qscat {

namespace {

const WallSupport& support_of(const ScatteringDiagram& d, size_t i) {
    return d.kind == DiagramKind::standard ? d.walls[i].support : d.nwalls[i].support;
}

VecZ wall_step(const ScatteringDiagram& d, size_t i, long level) {
    if (d.kind == DiagramKind::standard) return scale(d.walls[i].exp_dir, level);
    return d.nwalls[i].exponent;
}

// crossing groups along the backward ray x + t u, t > 0, sorted by t
struct RayGroup {
    QQ t;
    VecQ point;
    std::vector<size_t> walls;
};

std::vector<RayGroup> ray_groups(const ScatteringDiagram& diag, const VecQ& x, const VecQ& u) {
    std::map<QQ, RayGroup> by_t;
    for (size_t i = 0; i < diag.wall_count(); ++i) {
        const WallSupport& s = support_of(diag, i);
        QQ v0 = dot(s.normal, x) - s.offset;
        QQ vd = dot(s.normal, u);
        if (vd == 0) {
            if (v0 == 0) {
                // ray inside the carrier: non-generic if it meets the support
                HPoly sp = s.to_poly(static_cast<int>(x.size()));
                std::vector<LinCond> sys;  // one variable t along the ray
                for (const LinCond& c : sp.ge)
                    sys.push_back({{dot(c.a, u)}, c.b - dot(c.a, x), false});
                sys.push_back({{QQ(1)}, QQ(0), true});  // t > 0
                if (fm_feasible(sys, 1))
                    throw genericity_error("broken line segment runs inside a wall");
            }
            continue;
        }
        QQ t = -v0 / vd;
        if (t <= 0) continue;
        VecQ pt = add(x, scale(u, t));
        HPoly sp = s.to_poly(static_cast<int>(x.size()));
        if (!sp.contains(pt)) continue;
        if (!sp.active_at(pt).empty())
            throw genericity_error("broken line meets a wall boundary (joint)");
        auto& g = by_t[t];
        g.t = t;
        g.point = pt;
        g.walls.push_back(i);
    }
    std::vector<RayGroup> out;
    for (auto& [t, g] : by_t) {
        // non-parallel walls at one point form a joint: non-generic trajectory
        for (size_t i = 1; i < g.walls.size(); ++i) {
            const VecZ& n1 = support_of(diag, g.walls[i]).normal;
            const VecZ& n0 = support_of(diag, g.walls[0]).normal;
            if (!(n1 == n0 || n1 == scale(n0, -1)))
                throw genericity_error("broken line passes through a joint");
        }
        out.push_back(std::move(g));
    }
    return out;
}

struct SearchCtx {
    const ScatteringDiagram& diag;
    const VecZ& p;
    long order;
    std::vector<BrokenLine>& out;
    VecZ target;  // final exponent of this search root
};

// backward search: current point x, current exponent v (already includes all
// bends later along the line), accumulated bends in backward order
void search(SearchCtx& ctx, const VecQ& x, const VecZ& v, uint64_t umask,
            std::vector<Bend>& bends) {
    const GradedLattice& lat = ctx.diag.lat;
    if (v == ctx.p) {
        // initial segment: runs straight to infinity; probe its genericity
        (void)ray_groups(ctx.diag, x, lat.pi1(v));
        BrokenLine line;
        line.initial = ctx.p;
        line.endpoint = x;  // overwritten with Q by the caller
        line.bends.assign(bends.rbegin(), bends.rend());
        line.final_exp = ctx.target;
        line.umask = umask;
        ctx.out.push_back(std::move(line));
        return;
    }
    VecZ rel = sub(v, ctx.p);
    if (!lat.in_Nplus(rel)) return;
    if (lat.in_ker_pi1(v)) return;  // segment exponents stay outside ker pi1
    VecQ u = lat.pi1(v);
    std::vector<RayGroup> groups = ray_groups(ctx.diag, x, u);
    for (const RayGroup& g : groups) {
        // bend choices: nonempty subsets of the parallel group with level per
        // wall; enumerated in canonical order (walls sorted by index)
        std::vector<std::pair<size_t, long>> chosen;
        std::function<void(size_t)> pick = [&](size_t gi) {
            if (gi == g.walls.size()) {
                if (chosen.empty()) return;
                VecZ v2 = v;
                uint64_t um2 = umask;
                bool ok = true;
                for (auto& [wi, lev] : chosen) {
                    v2 = sub(v2, wall_step(ctx.diag, wi, lev));
                    if (ctx.diag.kind == DiagramKind::perturbed) {
                        uint64_t im = ctx.diag.nwalls[wi].index_mask;
                        if (um2 & im) {
                            ok = false;
                            break;
                        }
                        um2 |= im;
                    }
                }
                if (!ok) return;
                VecZ rel2 = sub(v2, ctx.p);
                if (!lat.in_Nplus0(rel2)) return;
                if (v2 != ctx.p && lat.in_ker_pi1(v2)) return;
                for (auto& [wi, lev] : chosen) bends.push_back({g.point, wi, lev});
                search(ctx, g.point, v2, um2, bends);
                bends.resize(bends.size() - chosen.size());
                return;
            }
            pick(gi + 1);  // no bend at this wall
            size_t wi = g.walls[gi];
            long maxlev = 1;
            if (ctx.diag.kind == DiagramKind::standard) {
                long dd = d_deg(ctx.diag.walls[wi].exp_dir);
                maxlev = dd > 0 ? ctx.order / dd : 0;
            }
            for (long lev = 1; lev <= maxlev; ++lev) {
                chosen.emplace_back(wi, lev);
                pick(gi + 1);
                chosen.pop_back();
            }
        };
        pick(0);
    }
}

}  // namespace

std::vector<VecZ> BrokenLine::segment_exponents(const ScatteringDiagram& diag) const {
    std::vector<VecZ> out{initial};
    VecZ v = initial;
    for (const Bend& b : bends) {
        v = add(v, wall_step(diag, b.wall, b.level));
        out.push_back(v);
    }
    return out;
}

std::vector<BrokenLine> enumerate_broken_lines(const ScatteringDiagram& diag, const VecZ& p,
                                               const VecQ& Q, long order) {
    const GradedLattice& lat = diag.lat;
    if (lat.in_ker_pi1(p)) throw input_error("broken line enumeration needs p outside ker(pi1)");
    for (size_t i = 0; i < diag.wall_count(); ++i)
        if (support_of(diag, i).to_poly(lat.rank).contains(Q))
            throw genericity_error("base point lies on a wall support");
    // enumerate over final exponents p + delta
    std::vector<VecZ> deltas;
    std::vector<int> uf = lat.unfrozen();
    VecZ cur(static_cast<size_t>(lat.rank), 0);
    std::function<void(size_t, long)> gen = [&](size_t idx, long rem) {
        if (idx == uf.size()) {
            deltas.push_back(cur);
            return;
        }
        for (long c = 0; c <= rem; ++c) {
            cur[static_cast<size_t>(uf[idx])] = c;
            gen(idx + 1, rem - c);
        }
        cur[static_cast<size_t>(uf[idx])] = 0;
    };
    gen(0, order);
    std::vector<BrokenLine> out;
    for (const VecZ& delta : deltas) {
        VecZ n = add(p, delta);
        if (lat.in_ker_pi1(n)) continue;
        std::vector<BrokenLine> lines;
        SearchCtx ctx{diag, p, order, lines, n};
        std::vector<Bend> bends;
        search(ctx, Q, n, 0, bends);
        for (BrokenLine& l : lines) {
            l.endpoint = Q;
            // a bend must pick an actual term of the crossing image
            if (line_coefficient(diag, l).is_zero()) continue;
            out.push_back(std::move(l));
        }
    }
    return out;
}

QRational line_coefficient(const ScatteringDiagram& diag, const BrokenLine& line) {
    const GradedLattice& lat = diag.lat;
    QRational c(QQ(1), lat.scale);
    VecZ v = line.initial;
    for (const Bend& b : line.bends) {
        if (diag.kind == DiagramKind::standard) {
            const Wall& w = diag.walls[b.wall];
            QQ wv = lat.form(v, w.exp_dir);
            int sign = wv > 0 ? 1 : (wv < 0 ? -1 : 0);
            if (sign == 0) return QRational(QQ(0), lat.scale);
            std::vector<QRational> a = crossing_coefficients(lat, w, sign, wv, b.level);
            c *= a[static_cast<size_t>(b.level)];
        } else {
            const NilpotentWall& w = diag.nwalls[b.wall];
            QQ wv = lat.form(v, w.exponent);
            // [|W(v,n)|]_q a_d per the simple-break rule
            c *= qnum(abs(wv), lat.scale) * w.coeff;
        }
        v = add(v, wall_step(diag, b.wall, b.level));
    }
    return c;
}

Series theta(const ScatteringDiagram& diag, const VecZ& p, const VecQ& Q, long order) {
    const GradedLattice& lat = diag.lat;
    if (lat.in_ker_pi1(p)) return series_monomial(lat, p, QRational(QQ(1), lat.scale), order);
    std::vector<BrokenLine> lines = enumerate_broken_lines(diag, p, Q, order);
    Series s = series_zero(lat, p, order);
    for (const BrokenLine& l : lines) s.add_term(lat, l.final_exp, l.umask, line_coefficient(diag, l));
    return s;
}

Series theta_product(const ScatteringDiagram& diag, const std::vector<VecZ>& ps, const VecQ& Q,
                     long order) {
    const GradedLattice& lat = diag.lat;
    Series acc = series_one(lat, order);
    for (const VecZ& p : ps) acc = mul(lat, acc, theta(diag, p, Q, order));
    return acc;
}

QRational product_coefficient(const ScatteringDiagram& diag, const std::vector<VecZ>& ps,
                              const VecZ& n, const VecQ& Q, long order) {
    const GradedLattice& lat = diag.lat;
    VecZ total(static_cast<size_t>(lat.rank), 0);
    for (const VecZ& p : ps) total = add(total, p);
    VecZ rel = sub(n, total);
    if (!lat.in_Nplus0(rel) || d_deg(rel) > order)
        throw truncation_error("requested coefficient outside the truncation window");
    Series prod = theta_product(diag, ps, Q, order);
    return prod.coeff(n);
}

QRational structure_constant(const ScatteringDiagram& diag, const std::vector<VecZ>& ps,
                             const VecZ& n, long order, Rng& rng, StructureConstantInfo* info) {
    const GradedLattice& lat = diag.lat;
    if (ps.empty()) {
        // empty product = theta_0 = 1
        QRational r(QQ(is_zero(n) ? 1 : 0), lat.scale);
        return r;
    }
    // W(n, N^+) = 0: any generic base point works
    bool central = true;
    for (int i : lat.unfrozen()) {
        VecZ fi(static_cast<size_t>(lat.rank), 0);
        fi[static_cast<size_t>(i)] = 1;
        if (lat.form(n, fi) != 0) central = false;
    }
    auto eval_at = [&](const VecQ& Q) { return product_coefficient(diag, ps, n, Q, order); };
    if (central) {
        for (int attempt = 0; attempt < 32; ++attempt) {
            VecQ Q = rng.generic_point(static_cast<size_t>(lat.rank));
            try {
                QRational v = eval_at(Q);
                if (info) {
                    info->base_point = Q;
                    info->closeness = 0;
                    info->certified = true;
                }
                return v;
            } catch (const genericity_error&) {
            }
        }
        throw budget_error("no generic base point found");
    }
    VecQ target = lat.pi1(n);
    for (int attempt = 0; attempt < 16; ++attempt) {
        VecQ eta = rng.generic_point(static_cast<size_t>(lat.rank), 2);
        QQ eps(1, 8);
        auto q_at = [&](const QQ& e) { return add(target, scale(eta, e)); };
        try {
            QRational v0 = eval_at(q_at(eps));
            for (int refine = 0; refine < 6; ++refine) {
                QQ e1 = eps / 16, e2 = eps / 256;
                QRational v1 = eval_at(q_at(e1));
                QRational v2 = eval_at(q_at(e2));
                if (v0 == v1 && v1 == v2) {
                    if (info) {
                        info->base_point = q_at(eps);
                        info->closeness = eps;
                        info->certified = true;
                    }
                    return v0;
                }
                eps = e2;
                v0 = v2;
            }
            throw budget_error("closeness undecided: stabilization certificate failed");
        } catch (const genericity_error&) {
            // resample the approach direction
        }
    }
    throw budget_error("no generic approach direction for the structure constant");
}

Series rebase(const GradedLattice& lat, const Series& s, const VecZ& new_base, long order) {
    Series out = series_zero(lat, new_base, order);
    for (const auto& [k, c] : s.terms) out.add_term(lat, k.e, k.u, c);
    return out;
}

std::map<VecZ, QRational> expand_in_theta_basis(const ScatteringDiagram& diag, const Series& f,
                                                const VecQ& Q, long order) {
    const GradedLattice& lat = diag.lat;
    std::map<VecZ, QRational> out;
    Series rem = f;
    long base_d = d_deg(f.base);
    for (int guard = 0; !rem.is_zero(); ++guard) {
        if (guard > 4096) throw budget_error("theta expansion did not terminate");
        // minimal d-degree term, lexicographic tie break
        const SKey* best = nullptr;
        for (const auto& [k, c] : rem.terms) {
            if (k.u != 0) throw input_error("theta expansion of a u-carrying series");
            if (!best || d_deg(k.e) < d_deg(best->e) || (d_deg(k.e) == d_deg(best->e) && k.e < best->e))
                best = &k;
        }
        VecZ p0 = best->e;
        QRational a = rem.terms.at(*best);
        long rel_order = order - (d_deg(p0) - base_d);
        Series th = theta(diag, p0, Q, rel_order);
        Series shifted = rebase(lat, scalar_mul(th, a), f.base, order);
        rem = sub(lat, rem, shifted);
        out[p0] = out.count(p0) ? out[p0] + a : a;
        if (out[p0].is_zero()) out.erase(p0);
    }
    return out;
}

QRational trace(const ScatteringDiagram& diag, const Series& f, const VecQ& Q, long order) {
    auto exp = expand_in_theta_basis(diag, f, Q, order);
    VecZ zero(static_cast<size_t>(diag.lat.rank), 0);
    auto it = exp.find(zero);
    return it == exp.end() ? QRational(QQ(0), diag.lat.scale) : it->second;
}

VecZ KSplit::project(const VecZ& n) const {
    VecZ out(proj_rows.size());
    for (size_t i = 0; i < proj_rows.size(); ++i) out[i] = dot(proj_rows[i], n);
    return out;
}

VecZ KSplit::lift(const VecZ& nbar) const {
    if (sec_cols.empty()) return {};
    VecZ out(sec_cols[0].size(), 0);
    for (size_t j = 0; j < sec_cols.size(); ++j) out = add(out, scale(sec_cols[j], nbar[j]));
    return out;
}

std::map<VecZ, QRational> trace_K(const ScatteringDiagram& diag, const Series& f, const VecQ& Q,
                                  long order, const KSplit& ks) {
    auto exp = expand_in_theta_basis(diag, f, Q, order);
    std::map<VecZ, QRational> out;
    for (const auto& [n, c] : exp) {
        if (!ks.in_K(n)) continue;
        auto it = out.find(n);
        if (it == out.end())
            out.emplace(n, c);
        else
            it->second += c;
    }
    return out;
}

VecQ generic_base_point(const ScatteringDiagram& diag, Rng& rng, long span) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        VecQ Q = rng.generic_point(static_cast<size_t>(diag.lat.rank), span);
        bool on_wall = false;
        for (size_t i = 0; i < diag.wall_count(); ++i)
            if (support_of(diag, i).to_poly(diag.lat.rank).contains(Q)) on_wall = true;
        if (!on_wall) return Q;
    }
    throw budget_error("no generic base point found");
}

}  // namespace qscat
