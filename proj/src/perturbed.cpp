#include "qscat/perturbed.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "qscat/parallel.hpp"

namespace qscat {

uint64_t u_bit(int slot, long j, long k) {
    long bit = slot * k + j;
    if (bit >= 64) throw input_error("perturbation index space exceeds 64 bits");
    return uint64_t(1) << bit;
}

uint64_t u_mask_of_set(int slot, const std::vector<long>& js, long k) {
    uint64_t m = 0;
    for (long j : js) m |= u_bit(slot, j, k);
    return m;
}

namespace {

QQ factorial(long n) {
    QQ r = 1;
    for (long i = 2; i <= n; ++i) r *= i;
    return r;
}

void subsets_of_size(long k, long w, std::vector<std::vector<long>>& out) {
    std::vector<long> cur;
    std::function<void(long)> rec = [&](long start) {
        if (static_cast<long>(cur.size()) == w) {
            out.push_back(cur);
            return;
        }
        for (long j = start; j < k; ++j) {
            cur.push_back(j);
            rec(j + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

}  // namespace

ScatteringDiagram perturb_factor(const GradedLattice& lat, const PerturbOptions& opt,
                                 const PerturbedSetup* pinned) {
    ScatteringDiagram d;
    d.lat = lat;
    d.order = opt.order;
    d.kind = DiagramKind::perturbed;
    const long k = opt.order;
    std::vector<int> uf = lat.unfrozen();
    if (static_cast<long>(uf.size()) * k > 64)
        throw input_error("order times unfrozen rank exceeds the u-variable capacity");
    ImageLattice im = image_lattice(lat);
    Rng rng(opt.seed);
    for (size_t slot = 0; slot < uf.size(); ++slot) {
        int i = uf[slot];
        const QQ& di = lat.multiplier(i);
        VecZ fi(static_cast<size_t>(lat.rank), 0);
        fi[static_cast<size_t>(i)] = 1;
        for (long w = 1; w <= k; ++w) {
            QRational coeff = level_coefficient(w, di, lat.scale);
            coeff.mul_scalar(factorial(w));
            std::vector<std::vector<long>> js;
            subsets_of_size(k, w, js);
            for (const std::vector<long>& J : js) {
                NilpotentWall nw;
                nw.exponent = scale(fi, w);
                nw.coeff = coeff;
                nw.index_mask = u_mask_of_set(static_cast<int>(slot), J, k);
                nw.support.normal = fi;
                VecQ offset;
                if (pinned) {
                    auto it = pinned->offsets.find({static_cast<int>(slot), w, nw.index_mask});
                    if (it != pinned->offsets.end()) offset = it->second;
                }
                if (offset.empty()) {
                    VecQ mbar = rng.generic_point(static_cast<size_t>(im.rank), opt.offset_span);
                    offset = im.embed(mbar);
                }
                nw.support.offset = dot(fi, offset);
                d.nwalls.push_back(std::move(nw));
            }
        }
    }
    return d;
}

namespace {

// strict interior point of the codimension-2 crossing of two wall supports;
// nullopt when the crossing is empty, lower-dimensional, or boundary-contained
std::optional<VecQ> proper_crossing(const GradedLattice& lat, const WallSupport& a,
                                    const WallSupport& b) {
    HPoly p = intersect(a.to_poly(lat.rank), b.to_poly(lat.rank));
    auto chart = solve_equalities(p);
    if (!chart) return std::nullopt;
    if (chart->ydim() != lat.rank - 2) return std::nullopt;  // parallel carriers
    auto y = fm_strict_point(restrict_ineqs(p, *chart), chart->ydim());
    if (!y) return std::nullopt;
    return chart->point(*y);
}

bool masks_disjoint(uint64_t a, uint64_t b) { return (a & b) == 0; }

}  // namespace

ScatteringDiagram complete_perturbed_once(const ScatteringDiagram& d0) {
    ScatteringDiagram d = d0;
    const GradedLattice& lat = d.lat;
    const long k = d.order;
    // pairs that already have a child (makes completion idempotent)
    std::set<std::pair<int, int>> processed;
    for (const NilpotentWall& w : d.nwalls)
        if (w.parent1 >= 0) processed.insert({w.parent1, w.parent2});
    size_t round_begin = 0;  // walls born in the previous round start here
    for (int round = 1;; ++round) {
        size_t n_walls = d.nwalls.size();
        std::vector<std::pair<size_t, size_t>> cand;
        for (size_t b = round_begin; b < n_walls; ++b) {
            for (size_t a = 0; a < b; ++a) {
                const NilpotentWall& wa = d.nwalls[a];
                const NilpotentWall& wb = d.nwalls[b];
                if (d_deg(wa.exponent) + d_deg(wb.exponent) > k) continue;
                if (!masks_disjoint(wa.index_mask, wb.index_mask)) continue;
                if (lat.form(wa.exponent, wb.exponent) == 0) continue;
                if (processed.count({static_cast<int>(a), static_cast<int>(b)})) continue;
                cand.emplace_back(a, b);
            }
        }
        struct Child {
            bool present = false;
            NilpotentWall wall;
            VecQ joint_point;
        };
        std::vector<Child> children(cand.size());
        std::vector<std::string> errors(cand.size());
        parallel_for(cand.size(), [&](size_t ci) {
            try {
                auto [a, b] = cand[ci];
                const NilpotentWall& wa = d.nwalls[a];
                const NilpotentWall& wb = d.nwalls[b];
                auto x = proper_crossing(lat, wa.support, wb.support);
                if (!x) return;
                VecZ n = add(wa.exponent, wb.exponent);
                NilpotentWall nw;
                nw.exponent = n;
                nw.coeff =
                    wa.coeff * wb.coeff * qnum(abs(lat.form(wa.exponent, wb.exponent)), lat.scale);
                nw.index_mask = wa.index_mask | wb.index_mask;
                nw.parent1 = static_cast<int>(a);
                nw.parent2 = static_cast<int>(b);
                HPoly joint = intersect(wa.support.to_poly(lat.rank), wb.support.to_poly(lat.rank));
                VecQ raydir = scale(lat.pi1(n), QQ(-1));
                if (is_zero(raydir)) throw genericity_error("child direction vanishes");
                HPoly sup = extrude(joint, raydir);
                nw.support.normal = primitive_part(n);
                nw.support.offset = dot(nw.support.normal, *x);
                for (const LinCond& c : sup.ge) nw.support.cuts.push_back(c);
                children[ci].present = true;
                children[ci].wall = std::move(nw);
                children[ci].joint_point = *x;
            } catch (const std::exception& e) {
                errors[ci] = e.what();
            }
        });
        for (const std::string& e : errors)
            if (!e.empty()) throw genericity_error(e);
        // hypothesis (b): no third wall with disjoint indices through a pair joint
        std::vector<char> bad(cand.size(), 0);
        parallel_for(cand.size(), [&](size_t ci) {
            if (!children[ci].present) return;
            auto [a, b] = cand[ci];
            uint64_t mab = d.nwalls[a].index_mask | d.nwalls[b].index_mask;
            for (size_t c = 0; c < n_walls; ++c) {
                if (c == a || c == b) continue;
                if (!masks_disjoint(d.nwalls[c].index_mask, mab)) continue;
                if (d.nwalls[c].support.to_poly(lat.rank).contains(children[ci].joint_point)) {
                    bad[ci] = 1;
                    return;
                }
            }
        });
        for (char b : bad)
            if (b) throw genericity_error("three walls with disjoint index sets meet in codim 2");
        size_t added = 0;
        round_begin = n_walls;
        for (size_t ci = 0; ci < cand.size(); ++ci) {
            if (!children[ci].present) continue;
            children[ci].wall.birth_round = round;
            processed.insert({children[ci].wall.parent1, children[ci].wall.parent2});
            d.nwalls.push_back(std::move(children[ci].wall));
            ++added;
        }
        if (added == 0) break;
        long cap = k * static_cast<long>(lat.unfrozen().size());
        if (round > cap + 1)
            throw budget_error("perturbed completion exceeded the stabilization bound");
    }
    return d;
}

ScatteringDiagram perturb_and_complete(const GradedLattice& lat, const PerturbOptions& opt,
                                       const PerturbedSetup* pinned) {
    PerturbOptions o = opt;
    for (int attempt = 0; attempt < opt.resample_cap; ++attempt) {
        try {
            ScatteringDiagram d0 = perturb_factor(lat, o, pinned);
            return complete_perturbed_once(d0);
        } catch (const genericity_error&) {
            o.seed = o.seed * 6364136223846793005ULL + 1442695040888963407ULL;
        }
    }
    throw budget_error("offset resampling cap reached without a generic configuration");
}

ScatteringDiagram asymptotic(const ScatteringDiagram& d) {
    ScatteringDiagram out = d;
    auto strip = [&](WallSupport& s) {
        s.offset = 0;
        for (LinCond& c : s.cuts) c.b = 0;
    };
    for (Wall& w : out.walls) strip(w.support);
    for (NilpotentWall& w : out.nwalls) strip(w.support);
    return out;
}

std::vector<size_t> wall_leaves(const ScatteringDiagram& d, size_t wall) {
    std::vector<size_t> out;
    std::vector<size_t> stack{wall};
    while (!stack.empty()) {
        size_t i = stack.back();
        stack.pop_back();
        const NilpotentWall& w = d.nwalls[i];
        if (w.parent1 < 0) {
            out.push_back(i);
        } else {
            stack.push_back(static_cast<size_t>(w.parent1));
            stack.push_back(static_cast<size_t>(w.parent2));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

ScatteringDiagram collapse(const ScatteringDiagram& d) {
    if (d.kind != DiagramKind::perturbed) throw input_error("collapse expects a perturbed diagram");
    const GradedLattice& lat = d.lat;
    const long k = d.order;
    std::vector<int> uf = lat.unfrozen();
    std::map<std::pair<std::string, VecZ>, std::vector<size_t>> groups;
    for (size_t i = 0; i < d.nwalls.size(); ++i) {
        const NilpotentWall& w = d.nwalls[i];
        groups[{poly_key(w.support.to_poly(lat.rank)), w.exponent}].push_back(i);
    }
    ScatteringDiagram out;
    out.lat = lat;
    out.order = d.order;
    out.kind = DiagramKind::standard;
    std::map<std::pair<std::string, VecZ>, Wall> merged;  // (cone, primitive dir)
    for (const auto& [key, members] : groups) {
        const VecZ& n = key.second;
        // canonical index fiber (lowest copies per slot) and its factorial norm
        uint64_t canonical = 0, top = 0;
        QQ fact = 1;
        for (size_t slot = 0; slot < uf.size(); ++slot) {
            long ni = n[static_cast<size_t>(uf[slot])];
            if (ni < 0 || ni > k) throw std::logic_error("collapse: exponent outside the window");
            for (long j = 0; j < ni; ++j) {
                canonical |= u_bit(static_cast<int>(slot), j, k);
                top |= u_bit(static_cast<int>(slot), k - 1 - j, k);
            }
            fact *= factorial(ni);
        }
        QRational level(QQ(0), lat.scale);
        for (size_t i : members)
            if (d.nwalls[i].index_mask == canonical) level += d.nwalls[i].coeff;
        level.mul_scalar(QQ(1) / fact);
        if (top != canonical) {
            // equivalence invariance: an independent index fiber must agree
            QRational level2(QQ(0), lat.scale);
            for (size_t i : members)
                if (d.nwalls[i].index_mask == top) level2 += d.nwalls[i].coeff;
            level2.mul_scalar(QQ(1) / fact);
            if (!(level2 == level))
                throw std::logic_error("collapse: index-set fibers disagree");
        }
        if (level.is_zero()) continue;
        VecZ dir = primitive_part(n);
        long lev = vec_index(n);
        auto [it, fresh] = merged.try_emplace(std::make_pair(key.first, dir));
        if (fresh) {
            const NilpotentWall& w0 = d.nwalls[members.front()];
            it->second.support = w0.support;
            it->second.support.normal = dir;
            it->second.exp_dir = dir;
        }
        auto jt = it->second.logfn.find(lev);
        if (jt == it->second.logfn.end())
            it->second.logfn[lev] = level;
        else {
            jt->second += level;
            if (jt->second.is_zero()) it->second.logfn.erase(jt);
        }
    }
    for (auto& [key, w] : merged)
        if (!w.logfn.empty()) out.walls.push_back(std::move(w));
    merge_parallel_walls(out);
    sort_walls(out);
    return out;
}

}  // namespace qscat
