#include "qscat/tropical.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <sstream>

namespace qscat {

long WeightVector::total(size_t slot) const {
    long s = 0;
    for (long x : w[slot]) s += x;
    return s;
}

long WeightVector::total() const {
    long s = 0;
    for (size_t i = 0; i < w.size(); ++i) s += total(i);
    return s;
}

QQ WeightVector::aut() const {
    QQ a = 1;
    for (const std::vector<long>& wi : w) {
        size_t i = 0;
        while (i < wi.size()) {
            size_t j = i;
            while (j < wi.size() && wi[j] == wi[i]) ++j;
            for (size_t m = 2; m <= j - i; ++m) a *= static_cast<long>(m);
            i = j;
        }
    }
    return a;
}

std::string WeightVector::to_string() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) os << ";";
        for (size_t j = 0; j < w[i].size(); ++j) {
            if (j) os << ",";
            os << w[i][j];
        }
    }
    os << ")";
    return os.str();
}

QRational r_weight(const GradedLattice& lat, const WeightVector& ww) {
    QRational r(QQ(1), lat.scale);
    std::vector<int> uf = lat.unfrozen();
    for (size_t slot = 0; slot < ww.w.size(); ++slot)
        for (long wij : ww.w[slot]) r *= level_coefficient(wij, lat.multiplier(uf[slot]), lat.scale);
    return r;
}

namespace {

void partitions_of(long n, long maxpart, std::vector<long>& cur,
                   std::vector<std::vector<long>>& out) {
    if (n == 0) {
        std::vector<long> p = cur;
        std::reverse(p.begin(), p.end());  // ascending
        out.push_back(std::move(p));
        return;
    }
    for (long p = std::min(n, maxpart); p >= 1; --p) {
        cur.push_back(p);
        partitions_of(n - p, p, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<WeightVector> weight_vectors_for(const GradedLattice& lat,
                                             const std::vector<VecZ>& ps, const VecZ& n) {
    std::vector<int> uf = lat.unfrozen();
    VecZ rem = n;
    for (const VecZ& p : ps) rem = sub(rem, p);
    // rem must be a nonnegative combination of unfrozen basis vectors
    for (int i = 0; i < lat.rank; ++i) {
        if (lat.is_frozen(i)) {
            if (rem[static_cast<size_t>(i)] != 0) return {};
        } else if (rem[static_cast<size_t>(i)] < 0) {
            return {};
        }
    }
    std::vector<std::vector<std::vector<long>>> per_slot;
    for (size_t slot = 0; slot < uf.size(); ++slot) {
        long b = rem[static_cast<size_t>(uf[slot])];
        std::vector<std::vector<long>> parts;
        if (b == 0) {
            parts.push_back({});
        } else {
            std::vector<long> cur;
            partitions_of(b, b, cur, parts);
        }
        per_slot.push_back(std::move(parts));
    }
    std::vector<WeightVector> out;
    std::vector<size_t> idx(per_slot.size(), 0);
    for (;;) {
        WeightVector ww;
        for (size_t slot = 0; slot < per_slot.size(); ++slot)
            ww.w.push_back(per_slot[slot][idx[slot]]);
        out.push_back(std::move(ww));
        size_t k = 0;
        while (k < idx.size()) {
            if (++idx[k] < per_slot[k].size()) break;
            idx[k] = 0;
            ++k;
        }
        if (k == idx.size()) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// tree multiplicities

std::string TropicalTree::canonical_string() const {
    std::vector<std::string> parts;
    for (const TropEdge& e : edges) {
        std::ostringstream os;
        os << qscat::to_string(vertices[static_cast<size_t>(e.from)]) << "<-";
        if (e.to >= 0)
            os << qscat::to_string(vertices[static_cast<size_t>(e.to)]);
        else
            os << "inf";
        os << "|" << qscat::to_string(e.lift) << "|w" << e.weight;
        if (e.mark_slot >= 0) os << "|E" << e.mark_slot << "." << e.mark_j;
        if (e.mark_end >= 0) os << "|F" << e.mark_end;
        parts.push_back(os.str());
    }
    std::sort(parts.begin(), parts.end());
    std::string s;
    for (const std::string& p : parts) s += p + ";";
    return s;
}

namespace {

QRational mult_generic(const GradedLattice& lat, const TropicalTree& tree,
                       QQ* classical_out) {
    const size_t nv = tree.vertices.size();
    // emanating weighted tangents: +pi1(lift) for leaf-ward edges (from == V),
    // -pi1(lift) for the root-ward edge (to == V)
    std::vector<std::vector<VecZ>> down(nv);  // leaf-ward edge lifts at each vertex
    std::vector<int> up_count(nv, 0);
    std::vector<VecQ> balance(nv, VecQ(static_cast<size_t>(lat.rank), QQ(0)));
    for (const TropEdge& e : tree.edges) {
        down[static_cast<size_t>(e.from)].push_back(e.lift);
        balance[static_cast<size_t>(e.from)] = add(balance[static_cast<size_t>(e.from)], lat.pi1(e.lift));
        if (e.to >= 0) {
            ++up_count[static_cast<size_t>(e.to)];
            balance[static_cast<size_t>(e.to)] =
                sub(balance[static_cast<size_t>(e.to)], lat.pi1(e.lift));
        }
    }
    QRational mq(QQ(1), lat.scale);
    QQ mc = 1;
    for (size_t v = 1; v < nv; ++v) {
        if (!is_zero(balance[v]))
            throw std::logic_error("tropical tree violates balancing at vertex " +
                                   std::to_string(v));
        if (down[v].empty()) continue;  // chain vertex of an unbounded edge? not expected
        if (down[v].size() != 2 || up_count[v] != 1)
            throw genericity_error("non-trivalent unmarked vertex in a tropical tree");
        QQ pairing = abs(lat.form(down[v][0], down[v][1]));
        mq *= qnum(pairing, lat.scale);
        mc *= pairing;
    }
    // root ordering factor
    if (tree.root_lifts.size() >= 2) {
        QQ e = 0;
        for (size_t i = 0; i < tree.root_lifts.size(); ++i)
            for (size_t j = i + 1; j < tree.root_lifts.size(); ++j)
                e += lat.form(tree.root_lifts[i], tree.root_lifts[j]);
        mq *= QRational::q_power(e, lat.scale);
    }
    if (classical_out) *classical_out = mc;
    return mq;
}

}  // namespace

QRational mult_q(const GradedLattice& lat, const TropicalTree& tree) {
    return mult_generic(lat, tree, nullptr);
}

QQ mult_classical(const GradedLattice& lat, const TropicalTree& tree) {
    QQ c;
    mult_generic(lat, tree, &c);
    return c;
}

// ---------------------------------------------------------------------------
// wall-ancestry enumeration

namespace {

struct LeafInfo {
    int slot;
    uint64_t jmask;  // bits within the slot
    long weight;
};

long copies_of(const ScatteringDiagram& pert, const GradedLattice& lat) {
    // leaf walls of slot 0 use bits [0, k): recover k from the highest bit
    std::vector<int> uf = lat.unfrozen();
    long k = 0;
    for (const NilpotentWall& w : pert.nwalls) {
        if (w.parent1 >= 0) continue;
        int slot = -1;
        for (size_t s = 0; s < uf.size(); ++s)
            if (w.exponent[static_cast<size_t>(uf[s])] > 0) slot = static_cast<int>(s);
        if (slot != 0) continue;
        uint64_t m = w.index_mask;
        int bit = 63;
        while (bit >= 0 && !(m & (uint64_t(1) << bit))) --bit;
        k = std::max(k, static_cast<long>(bit) + 1);
    }
    return k;
}

// canonical leaf wall set for ww: ascending weights take consecutive blocks
std::vector<size_t> canonical_leafset(const ScatteringDiagram& pert, const GradedLattice& lat,
                                      const WeightVector& ww, long copies) {
    std::vector<int> uf = lat.unfrozen();
    std::map<uint64_t, size_t> leaf_by_mask;
    for (size_t i = 0; i < pert.nwalls.size(); ++i)
        if (pert.nwalls[i].parent1 < 0) leaf_by_mask[pert.nwalls[i].index_mask] = i;
    std::vector<size_t> out;
    for (size_t slot = 0; slot < ww.w.size(); ++slot) {
        long start = 0;
        for (long wij : ww.w[slot]) {
            uint64_t mask = 0;
            for (long j = start; j < start + wij; ++j)
                mask |= u_bit(static_cast<int>(slot), j, copies);
            auto it = leaf_by_mask.find(mask);
            if (it == leaf_by_mask.end())
                throw input_error("perturbed diagram lacks the canonical leaf walls (copies too small)");
            out.push_back(it->second);
            start += wij;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct TreeBuilder {
    const ScatteringDiagram& pert;
    const GradedLattice& lat;
    const ImageLattice& im;
    TropicalTree tree;
    std::map<size_t, std::pair<int, int>> leaf_marks;  // wall -> (slot, j)

    long edge_weight(const VecZ& lift) {
        return vec_index(im.forward(lat, lift));
    }

    // attach the ancestry disk of `wall` below vertex `vat` located at `x`
    void build(size_t wall, int vat, const VecQ& x) {
        const NilpotentWall& w = pert.nwalls[wall];
        if (w.parent1 < 0) {
            TropEdge e;
            e.from = vat;
            e.to = -1;
            e.lift = w.exponent;
            e.weight = edge_weight(w.exponent);
            auto it = leaf_marks.find(wall);
            if (it != leaf_marks.end()) {
                e.mark_slot = it->second.first;
                e.mark_j = it->second.second;
            }
            tree.edges.push_back(std::move(e));
            return;
        }
        // travel along +pi1(n) to the parents' joint
        const NilpotentWall& p1 = pert.nwalls[static_cast<size_t>(w.parent1)];
        VecQ dir = lat.pi1(w.exponent);
        QQ num = p1.support.offset - dot(p1.support.normal, x);
        QQ den = dot(p1.support.normal, dir);
        if (den == 0) throw std::logic_error("ancestry trace parallel to the parent carrier");
        QQ t = num / den;
        if (t <= 0) throw genericity_error("ancestry trace does not reach the parent joint");
        VecQ y = add(x, scale(dir, t));
        int vy = static_cast<int>(tree.vertices.size());
        tree.vertices.push_back(y);
        TropEdge e;
        e.from = vat;
        e.to = vy;
        e.lift = w.exponent;
        e.weight = edge_weight(w.exponent);
        tree.edges.push_back(std::move(e));
        build(static_cast<size_t>(w.parent1), vy, y);
        build(static_cast<size_t>(w.parent2), vy, y);
    }
};

std::map<size_t, std::pair<int, int>> leaf_markings(const ScatteringDiagram& pert,
                                                    const GradedLattice& lat,
                                                    const WeightVector& ww, long copies) {
    std::map<size_t, std::pair<int, int>> out;
    std::map<uint64_t, size_t> leaf_by_mask;
    for (size_t i = 0; i < pert.nwalls.size(); ++i)
        if (pert.nwalls[i].parent1 < 0) leaf_by_mask[pert.nwalls[i].index_mask] = i;
    for (size_t slot = 0; slot < ww.w.size(); ++slot) {
        long start = 0;
        for (size_t j = 0; j < ww.w[slot].size(); ++j) {
            long wij = ww.w[slot][j];
            uint64_t mask = 0;
            for (long b = start; b < start + wij; ++b)
                mask |= u_bit(static_cast<int>(slot), b, copies);
            out[leaf_by_mask.at(mask)] = {static_cast<int>(slot), static_cast<int>(j)};
            start += wij;
        }
    }
    return out;
}

uint64_t mask_of_leafset(const ScatteringDiagram& pert, const std::vector<size_t>& leaves) {
    uint64_t m = 0;
    for (size_t l : leaves) m |= pert.nwalls[l].index_mask;
    return m;
}

}  // namespace

ScatteringDiagram make_trop_diagram(const GradedLattice& lat, long order, long copies,
                                    uint64_t seed) {
    PerturbOptions opt;
    opt.order = copies;
    opt.seed = seed;
    // build the factored diagram with `copies` u-slots, then complete with the
    // d-truncation at `order`
    ScatteringDiagram d0 = perturb_factor(lat, opt);
    d0.order = order;
    for (int attempt = 0; attempt < 32; ++attempt) {
        try {
            return complete_perturbed_once(d0);
        } catch (const genericity_error&) {
            opt.seed = opt.seed * 6364136223846793005ULL + 1442695040888963407ULL;
            d0 = perturb_factor(lat, opt);
            d0.order = order;
        }
    }
    throw budget_error("tropical diagram: offset resampling cap reached");
}

std::vector<TropicalTree> enumerate_trop(const ScatteringDiagram& pert,
                                         const std::vector<VecZ>& ps, const WeightVector& ww,
                                         const RootSpec& root, long order) {
    const GradedLattice& lat = pert.lat;
    ImageLattice im = image_lattice(lat);
    long copies = copies_of(pert, lat);
    std::vector<size_t> leafset = canonical_leafset(pert, lat, ww, copies);
    auto marks = leaf_markings(pert, lat, ww, copies);
    std::vector<TropicalTree> out;

    if (ps.empty()) {
        // disks rooted on the support of a wall with exactly these leaves
        for (size_t wi = 0; wi < pert.nwalls.size(); ++wi) {
            if (ww.total() == 0) break;
            const NilpotentWall& w = pert.nwalls[wi];
            if (wall_leaves(pert, wi) != leafset) continue;
            VecQ x;
            HPoly sup = w.support.to_poly(lat.rank);
            if (root.is_line) {
                VecQ dirv = sub(root.line_b, root.line_a);
                QQ den = dot(w.support.normal, dirv);
                if (den == 0) continue;
                QQ t = (w.support.offset - dot(w.support.normal, root.line_a)) / den;
                x = add(root.line_a, scale(dirv, t));
                if (!sup.contains(x)) continue;
                if (!sup.active_at(x).empty())
                    throw genericity_error("line meets a wall on its boundary");
            } else {
                if (!sup.contains(root.point)) continue;
                if (!sup.active_at(root.point).empty())
                    throw genericity_error("root point on a wall boundary");
                x = root.point;
            }
            TreeBuilder tb{pert, lat, im, {}, marks};
            tb.tree.vertices.push_back(x);
            tb.build(wi, 0, x);
            out.push_back(std::move(tb.tree));
        }
        return out;
    }

    // s >= 1: tuples of broken lines glued at the root point
    if (root.is_line) throw input_error("point root required when end markings are present");
    std::vector<std::vector<BrokenLine>> lines;
    for (const VecZ& p : ps) lines.push_back(enumerate_broken_lines(pert, p, root.point, order));
    uint64_t target_mask = mask_of_leafset(pert, leafset);
    std::vector<const BrokenLine*> pick(ps.size(), nullptr);
    std::function<void(size_t, uint64_t)> rec = [&](size_t i, uint64_t acc) {
        if (i == ps.size()) {
            if (acc != target_mask) return;
            // leaf-set check: the union of bend-wall leaves must equal leafset
            std::vector<size_t> used;
            for (const BrokenLine* l : pick)
                for (const Bend& b : l->bends) {
                    std::vector<size_t> ls = wall_leaves(pert, b.wall);
                    used.insert(used.end(), ls.begin(), ls.end());
                }
            std::sort(used.begin(), used.end());
            if (used != leafset) return;
            // glue the trees
            TropicalTree tree;
            tree.vertices.push_back(root.point);
            for (size_t li = 0; li < pick.size(); ++li) {
                const BrokenLine& bl = *pick[li];
                std::vector<VecZ> segs = bl.segment_exponents(pert);
                // walk from Q backward: chain vertices at bend points
                int vat = 0;
                TreeBuilder tb{pert, lat, im, {}, marks};
                std::swap(tb.tree, tree);
                for (size_t bi = bl.bends.size(); bi-- > 0;) {
                    const Bend& b = bl.bends[bi];
                    int vb = static_cast<int>(tb.tree.vertices.size());
                    tb.tree.vertices.push_back(b.point);
                    TropEdge e;
                    e.from = vat;
                    e.to = vb;
                    e.lift = segs[bi + 1];
                    e.weight = tb.edge_weight(e.lift);
                    tb.tree.edges.push_back(std::move(e));
                    tb.build(b.wall, vb, b.point);
                    vat = vb;
                }
                TropEdge einf;
                einf.from = vat;
                einf.to = -1;
                einf.lift = bl.initial;
                einf.weight = tb.edge_weight(bl.initial);
                einf.mark_end = static_cast<int>(li);
                tb.tree.edges.push_back(std::move(einf));
                tree = std::move(tb.tree);
                tree.root_lifts.push_back(bl.final_exp);
            }
            out.push_back(std::move(tree));
            return;
        }
        for (const BrokenLine& l : lines[i]) {
            // bends must stay inside the target mask and be disjoint
            if (l.umask & ~target_mask) continue;
            if (l.umask & acc) continue;
            pick[i] = &l;
            rec(i + 1, acc | l.umask);
        }
    };
    // the tuple's final exponents must sum to p + leaves by construction of the
    // masks, so no extra exponent filter is needed here
    rec(0, 0);
    return out;
}

QRational ntrop(const GradedLattice& lat, const ScatteringDiagram& pert,
                const std::vector<VecZ>& ps, const WeightVector& ww, const RootSpec& root,
                long order) {
    QRational acc(QQ(0), lat.scale);
    for (const TropicalTree& t : enumerate_trop(pert, ps, ww, root, order))
        acc += mult_q(lat, t);
    return acc;
}

QRational tropfrob_coefficient(const GradedLattice& lat, const std::vector<VecZ>& ps,
                               const VecZ& n, const VecQ& Q, long order, uint64_t seed) {
    std::vector<WeightVector> wws = weight_vectors_for(lat, ps, n);
    VecZ total(static_cast<size_t>(lat.rank), 0);
    for (const VecZ& p : ps) total = add(total, p);
    if (d_deg(sub(n, total)) > order)
        throw truncation_error("tropical coefficient outside the truncation window");
    QRational acc(QQ(0), lat.scale);
    if (wws.empty()) return acc;
    long copies = 0;
    for (const WeightVector& ww : wws)
        for (size_t slot = 0; slot < ww.w.size(); ++slot)
            copies = std::max(copies, ww.total(slot));
    long budget = d_deg(sub(n, total));
    ScatteringDiagram pert = make_trop_diagram(lat, std::max(budget, 1L), std::max(copies, 1L), seed);
    RootSpec root;
    root.point = Q;
    for (const WeightVector& ww : wws) {
        QRational nt = ntrop(lat, pert, ps, ww, root, order);
        if (nt.is_zero()) continue;
        QRational term = nt * r_weight(lat, ww);
        term.mul_scalar(QQ(1) / ww.aut());
        acc += term;
    }
    return acc;
}

QQ tropfrob_coefficient_classical(const GradedLattice& lat, const std::vector<VecZ>& ps,
                                  const VecZ& n, const VecQ& Q, long order, uint64_t seed) {
    std::vector<WeightVector> wws = weight_vectors_for(lat, ps, n);
    QQ acc = 0;
    if (wws.empty()) return acc;
    long copies = 0;
    for (const WeightVector& ww : wws)
        for (size_t slot = 0; slot < ww.w.size(); ++slot)
            copies = std::max(copies, ww.total(slot));
    VecZ total(static_cast<size_t>(lat.rank), 0);
    for (const VecZ& p : ps) total = add(total, p);
    long budget = d_deg(sub(n, total));
    ScatteringDiagram pert = make_trop_diagram(lat, std::max(budget, 1L), std::max(copies, 1L), seed);
    RootSpec root;
    root.point = Q;
    std::vector<int> uf = lat.unfrozen();
    for (const WeightVector& ww : wws) {
        QQ nt = 0;
        for (const TropicalTree& t : enumerate_trop(pert, ps, ww, root, order))
            nt += mult_classical(lat, t);
        if (nt == 0) continue;
        QQ rw = 1;
        for (size_t slot = 0; slot < ww.w.size(); ++slot)
            for (long wij : ww.w[slot])
                rw *= classical_limit(level_coefficient(wij, lat.multiplier(uf[slot]), lat.scale));
        acc += nt * rw / ww.aut();
    }
    return acc;
}

std::map<long, QRational> scat_function_from_trop(const GradedLattice& lat, const VecZ& n,
                                                  const VecQ& line_a, const VecQ& line_b,
                                                  long order, uint64_t seed) {
    std::map<long, QRational> out;
    long dn = d_deg(n);
    if (dn <= 0) throw input_error("direction must lie in N^+");
    RootSpec root;
    root.is_line = true;
    root.line_a = line_a;
    root.line_b = line_b;
    for (long k = 1; k * dn <= order; ++k) {
        VecZ kn = scale(n, k);
        std::vector<WeightVector> wws = weight_vectors_for(lat, {}, kn);
        long copies = 0;
        for (const WeightVector& ww : wws)
            for (size_t slot = 0; slot < ww.w.size(); ++slot)
                copies = std::max(copies, ww.total(slot));
        if (wws.empty()) continue;
        ScatteringDiagram pert =
            make_trop_diagram(lat, std::max(d_deg(kn), 1L), std::max(copies, 1L), seed + static_cast<uint64_t>(k));
        QRational acc(QQ(0), lat.scale);
        for (const WeightVector& ww : wws) {
            QRational nt = ntrop(lat, pert, {}, ww, root, order);
            if (nt.is_zero()) continue;
            QRational term = nt * r_weight(lat, ww);
            term.mul_scalar(QQ(1) / ww.aut());
            acc += term;
        }
        if (!acc.is_zero()) out[k] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// rank-2 brute force oracle

namespace {

struct OracleLeaf {
    VecZ lift;          // in N
    bool constrained;   // E_{ij} leaves sit on a hyperplane
    VecZ normal;        // constraint <normal, x> = offset
    QQ offset;
    int mark_slot = -1, mark_j = -1, mark_end = -1;
};

struct Shape {  // full binary merge tree over leaf labels
    int leaf = -1;
    std::unique_ptr<Shape> a, b;
};

// enumerate unordered binary shapes: the block containing the minimum label
// is the left child
void shapes_rec(const std::vector<int>& labels, std::vector<std::unique_ptr<Shape>>& out) {
    if (labels.size() == 1) {
        auto s = std::make_unique<Shape>();
        s->leaf = labels[0];
        out.push_back(std::move(s));
        return;
    }
    size_t m = labels.size();
    for (uint64_t sel = 0; sel < (uint64_t(1) << (m - 1)); ++sel) {
        // subsets containing labels[0]: sel picks among the rest
        std::vector<int> A{labels[0]}, B;
        for (size_t i = 1; i < m; ++i) {
            if (sel & (uint64_t(1) << (i - 1)))
                A.push_back(labels[i]);
            else
                B.push_back(labels[i]);
        }
        if (B.empty()) continue;
        std::vector<std::unique_ptr<Shape>> as, bs;
        shapes_rec(A, as);
        shapes_rec(B, bs);
        for (auto& sa : as)
            for (auto& sb : bs) {
                auto clone = [](const Shape& s, auto&& self) -> std::unique_ptr<Shape> {
                    auto c = std::make_unique<Shape>();
                    c->leaf = s.leaf;
                    if (s.a) c->a = self(*s.a, self);
                    if (s.b) c->b = self(*s.b, self);
                    return c;
                };
                auto s = std::make_unique<Shape>();
                s->a = clone(*sa, clone);
                s->b = clone(*sb, clone);
                out.push_back(std::move(s));
            }
    }
}

}  // namespace

std::vector<TropicalTree> enumerate_trop_bruteforce(const ScatteringDiagram& pert,
                                                    const std::vector<VecZ>& ps,
                                                    const WeightVector& ww, const RootSpec& root,
                                                    long order) {
    const GradedLattice& lat = pert.lat;
    if (lat.rank != 2) throw input_error("brute-force enumerator is rank-2 only");
    ImageLattice im = image_lattice(lat);
    long copies = copies_of(pert, lat);
    std::vector<size_t> leafset = canonical_leafset(pert, lat, ww, copies);
    auto marks = leaf_markings(pert, lat, ww, copies);
    std::vector<int> uf = lat.unfrozen();

    std::vector<OracleLeaf> leaves;
    for (size_t wi : leafset) {
        const NilpotentWall& w = pert.nwalls[wi];
        OracleLeaf l;
        l.lift = w.exponent;
        l.constrained = true;
        l.normal = w.support.normal;
        l.offset = w.support.offset;
        l.mark_slot = marks.at(wi).first;
        l.mark_j = marks.at(wi).second;
        leaves.push_back(std::move(l));
    }
    for (size_t k = 0; k < ps.size(); ++k) {
        OracleLeaf l;
        l.lift = ps[k];
        l.constrained = false;
        l.mark_end = static_cast<int>(k);
        leaves.push_back(std::move(l));
    }
    const size_t nl = leaves.size();
    const size_t s = ps.size();
    std::vector<TropicalTree> out;

    // assignment of constraint leaves to components (component k contains F_k);
    // with s == 0 there is a single component
    size_t ncomp = std::max<size_t>(s, 1);
    std::vector<int> comp(nl, 0);
    for (size_t k = 0; k < s; ++k) comp[leafset.size() + k] = static_cast<int>(k);
    std::function<void(size_t)> assign = [&](size_t li) {
        if (li == leafset.size()) {
            // per component: enumerate shapes and solve
            std::vector<std::vector<int>> members(ncomp);
            for (size_t i = 0; i < nl; ++i) members[static_cast<size_t>(comp[i])].push_back(static_cast<int>(i));
            if (s >= 1)
                for (size_t k = 0; k < s; ++k)
                    if (members[k].empty()) return;  // F_k must be present (it is)
            // shape lists per component
            std::vector<std::vector<std::unique_ptr<Shape>>> shapes(ncomp);
            for (size_t c = 0; c < ncomp; ++c) {
                if (members[c].empty()) return;
                shapes_rec(members[c], shapes[c]);
            }
            std::vector<size_t> idx(ncomp, 0);
            for (;;) {
                // --- solve one combined configuration
                // unknowns: per component, merge vertices (m-1); plus the root
                // when it lies on a line
                TropicalTree tree;
                tree.vertices.push_back(root.is_line ? VecQ{QQ(0), QQ(0)} : root.point);
                std::vector<LinCond> rows;  // linear system in the unknowns
                long nunk = 0;
                struct PendingEdge {
                    int from, to;  // vertex ids (to = -1 unbounded)
                    VecZ lift;
                    int mark_slot, mark_j, mark_end;
                };
                std::vector<PendingEdge> pedges;
                std::vector<int> vert_unknown;  // unknown base index per vertex (-1: fixed)
                vert_unknown.push_back(root.is_line ? 0 : -1);
                if (root.is_line) nunk += 2;
                bool feasible = true;
                std::function<std::pair<int, VecZ>(const Shape&, int)> emit =
                    [&](const Shape& sh, int parent) -> std::pair<int, VecZ> {
                    if (sh.leaf >= 0) {
                        const OracleLeaf& l = leaves[static_cast<size_t>(sh.leaf)];
                        PendingEdge e{parent, -1, l.lift, l.mark_slot, l.mark_j, l.mark_end};
                        pedges.push_back(e);
                        return {parent, l.lift};
                    }
                    int v = static_cast<int>(vert_unknown.size());
                    tree.vertices.push_back(VecQ{QQ(0), QQ(0)});
                    vert_unknown.push_back(static_cast<int>(nunk));
                    nunk += 2;
                    auto [va, la] = emit(*sh.a, v);
                    auto [vb, lb] = emit(*sh.b, v);
                    (void)va;
                    (void)vb;
                    VecZ lift = add(la, lb);
                    PendingEdge e{parent, v, lift, -1, -1, -1};
                    pedges.push_back(e);
                    return {v, lift};
                };
                std::vector<VecZ> rlifts;
                for (size_t c = 0; c < ncomp; ++c) {
                    auto [v, lift] = emit(*shapes[c][idx[c]], 0);
                    (void)v;
                    rlifts.push_back(lift);
                }
                // build equations
                auto var_of = [&](int vertex, int coord) { return vert_unknown[static_cast<size_t>(vertex)] + coord; };
                auto add_row = [&](std::map<int, QQ> coeffs, QQ rhs) {
                    LinCond c;
                    c.a.assign(static_cast<size_t>(nunk), QQ(0));
                    for (auto& [i, q] : coeffs) c.a[static_cast<size_t>(i)] = q;
                    c.b = rhs;
                    rows.push_back(std::move(c));
                };
                for (const PendingEdge& e : pedges) {
                    VecQ dir = lat.pi1(e.lift);  // leaf-ward direction is +pi1(lift)
                    if (e.to >= 0) {
                        // collinearity: cross(x_to - x_from, dir) = 0
                        std::map<int, QQ> co;
                        QQ rhs = 0;
                        auto acc = [&](int vertex, const QQ& cx, const QQ& cy) {
                            int u = vert_unknown[static_cast<size_t>(vertex)];
                            if (u < 0) {
                                rhs -= cx * tree.vertices[static_cast<size_t>(vertex)][0] +
                                       cy * tree.vertices[static_cast<size_t>(vertex)][1];
                            } else {
                                co[u] += cx;
                                co[u + 1] += cy;
                            }
                        };
                        // (x_to - x_from) x dir = (xt-xf)*dir_y - (yt-yf)*dir_x
                        acc(e.to, dir[1], -dir[0]);
                        acc(e.from, -dir[1], dir[0]);
                        add_row(std::move(co), rhs);
                    }
                }
                // leaf line constraints
                {
                    size_t pi = 0;
                    for (const PendingEdge& e : pedges) {
                        (void)pi;
                        if (e.to != -1 || e.mark_slot < 0) continue;
                        // find the leaf record again
                        for (const OracleLeaf& l : leaves) {
                            if (l.mark_slot == e.mark_slot && l.mark_j == e.mark_j && l.constrained) {
                                std::map<int, QQ> co;
                                QQ rhs = l.offset;
                                int u = vert_unknown[static_cast<size_t>(e.from)];
                                if (u < 0) {
                                    // fixed root carrying a constrained leaf directly
                                    QQ v = dot(l.normal, tree.vertices[static_cast<size_t>(e.from)]);
                                    if (v != rhs) feasible = false;
                                } else {
                                    co[u] += QQ(l.normal[0]);
                                    co[u + 1] += QQ(l.normal[1]);
                                    add_row(std::move(co), rhs);
                                }
                                break;
                            }
                        }
                    }
                }
                if (root.is_line) {
                    VecQ dirv = sub(root.line_b, root.line_a);
                    // root on L: cross(x_root - a, dir) = 0
                    std::map<int, QQ> co;
                    co[0] = dirv[1];
                    co[1] = -dirv[0];
                    QQ rhs = root.line_a[0] * dirv[1] - root.line_a[1] * dirv[0];
                    add_row(std::move(co), rhs);
                }
                if (feasible) {
                    // solve rows exactly: square or overdetermined consistent
                    HPoly sys = HPoly::whole(static_cast<int>(nunk));
                    sys.eq = rows;
                    auto chart = solve_equalities(sys);
                    if (chart && chart->ydim() == 0) {
                        VecQ sol = chart->x0;
                        for (size_t v = 0; v < vert_unknown.size(); ++v) {
                            int u = vert_unknown[v];
                            if (u >= 0) tree.vertices[v] = VecQ{sol[static_cast<size_t>(u)],
                                                                sol[static_cast<size_t>(u) + 1]};
                        }
                        // orientation and nondegeneracy of bounded edges
                        bool good = true;
                        for (const PendingEdge& e : pedges) {
                            if (e.to < 0) continue;
                            VecQ dir = lat.pi1(e.lift);
                            VecQ seg = sub(tree.vertices[static_cast<size_t>(e.to)],
                                           tree.vertices[static_cast<size_t>(e.from)]);
                            // leaf-ward segment must be a positive multiple of +pi1(lift)
                            QQ cr = seg[0] * dir[1] - seg[1] * dir[0];
                            if (cr != 0) {
                                good = false;
                                break;
                            }
                            QQ along = seg[0] * dir[0] + seg[1] * dir[1];
                            if (along == 0) throw genericity_error("collapsed tropical edge");
                            if (along < 0) {
                                good = false;
                                break;
                            }
                        }
                        if (good) {
                            for (const PendingEdge& e : pedges) {
                                TropEdge te;
                                te.from = e.from;
                                te.to = e.to;
                                te.lift = e.lift;
                                te.weight = vec_index(im.forward(lat, e.lift));
                                te.mark_slot = e.mark_slot;
                                te.mark_j = e.mark_j;
                                te.mark_end = e.mark_end;
                                tree.edges.push_back(std::move(te));
                            }
                            if (s >= 1) tree.root_lifts = rlifts;
                            out.push_back(std::move(tree));
                        }
                    } else if (chart && chart->ydim() > 0) {
                        throw genericity_error("underdetermined tropical configuration");
                    }
                }
                // --- next shape combination
                size_t c = 0;
                while (c < ncomp) {
                    if (++idx[c] < shapes[c].size()) break;
                    idx[c] = 0;
                    ++c;
                }
                if (c == ncomp) break;
            }
            return;
        }
        for (size_t c = 0; c < ncomp; ++c) {
            comp[li] = static_cast<int>(c);
            assign(li + 1);
        }
        comp[li] = 0;
    };
    if (nl == 0) return out;
    assign(0);
    return out;
}

}  // namespace qscat
