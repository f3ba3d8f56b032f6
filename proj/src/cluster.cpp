#include "qscat/cluster.hpp"

#include <algorithm>
#include <set>

namespace qscat {

QQ Seed::pairing(const VecZ& a, const VecZ& b) const {
    QQ s = 0;
    for (int i = 0; i < rank; ++i) {
        if (a[static_cast<size_t>(i)] == 0) continue;
        for (int j = 0; j < rank; ++j) {
            if (b[static_cast<size_t>(j)] == 0) continue;
            s += QQ(a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)]) *
                 form[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
    }
    return s;
}

QQ Seed::epsilon(int i, int j) const {
    auto it = multipliers.find(j);
    if (it == multipliers.end())
        throw input_error("multiplier d_" + std::to_string(j + 1) + " not provided");
    return it->second * pairing(basis[static_cast<size_t>(i)], basis[static_cast<size_t>(j)]);
}

void Seed::validate() const {
    if (rank <= 0) throw input_error("seed rank must be positive");
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j)
            if (form[static_cast<size_t>(i)][static_cast<size_t>(j)] !=
                -form[static_cast<size_t>(j)][static_cast<size_t>(i)])
                throw input_error("seed form is not skew-symmetric");
    for (const auto& [i, d] : multipliers)
        if (d <= 0) throw input_error("seed multipliers must be positive");
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j) {
            if (!multipliers.count(j)) {
                if (!frozen.count(j))
                    throw input_error("unfrozen index " + std::to_string(j + 1) +
                                      " needs a multiplier");
                continue;  // frozen multipliers are optional
            }
            if (!is_integer(epsilon(i, j)))
                throw input_error("epsilon_{ij} = d_j {e_i, e_j} must be an integer");
        }
}

Seed make_seed(int rank, std::vector<VecQ> form, std::map<int, QQ> multipliers,
               std::set<int> frozen) {
    Seed s;
    s.rank = rank;
    s.form = std::move(form);
    s.multipliers = std::move(multipliers);
    s.frozen = std::move(frozen);
    for (int i = 0; i < rank; ++i) {
        VecZ e(static_cast<size_t>(rank), 0);
        e[static_cast<size_t>(i)] = 1;
        s.basis.push_back(std::move(e));
    }
    s.validate();
    return s;
}

Seed mutate(const Seed& seed, int j) {
    if (seed.frozen.count(j)) throw input_error("cannot mutate a frozen index");
    Seed out = seed;
    for (int i = 0; i < seed.rank; ++i) {
        if (i == j) {
            out.basis[static_cast<size_t>(i)] = scale(seed.basis[static_cast<size_t>(i)], -1);
        } else {
            QQ eps = seed.epsilon(i, j);
            if (eps > 0) {
                long k = long_value(eps);
                out.basis[static_cast<size_t>(i)] =
                    add(seed.basis[static_cast<size_t>(i)], scale(seed.basis[static_cast<size_t>(j)], k));
            }
        }
    }
    return out;
}

std::vector<VecQ> compatible_pair(const Seed& seed) {
    const int r = seed.rank;
    // preferred route: Lambda = B^{-1} D when the form is nondegenerate (and
    // every index carries a multiplier); the induced form on M
    bool full = true;
    for (int i = 0; i < r; ++i)
        if (!seed.multipliers.count(i)) full = false;
    if (full) {
        std::vector<LinCond> rows;
        for (int i = 0; i < r; ++i) {
            VecQ a(static_cast<size_t>(r));
            for (int j = 0; j < r; ++j) {
                VecZ ej(static_cast<size_t>(r), 0);
                ej[static_cast<size_t>(j)] = 1;
                a[static_cast<size_t>(j)] =
                    seed.multipliers.at(j) * seed.pairing(seed.basis[static_cast<size_t>(i)], ej);
            }
            rows.push_back({std::move(a), QQ(0), false});
        }
        // invert B by solving B X = D column by column
        std::vector<VecQ> lambda(static_cast<size_t>(r), VecQ(static_cast<size_t>(r), QQ(0)));
        bool ok = true;
        for (int c = 0; c < r && ok; ++c) {
            HPoly sys = HPoly::whole(r);
            for (int i = 0; i < r; ++i) {
                VecQ a = rows[static_cast<size_t>(i)].a;
                QQ rhs = (i == c) ? QQ(1) / seed.multipliers.at(c) : QQ(0);
                sys.add_eq(std::move(a), rhs);
            }
            auto chart = solve_equalities(sys);
            if (!chart || chart->ydim() != 0) {
                ok = false;
                break;
            }
            for (int i = 0; i < r; ++i)
                lambda[static_cast<size_t>(i)][static_cast<size_t>(c)] = chart->x0[static_cast<size_t>(i)];
        }
        if (ok) {
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    if (lambda[static_cast<size_t>(i)][static_cast<size_t>(j)] !=
                        -lambda[static_cast<size_t>(j)][static_cast<size_t>(i)])
                        ok = false;
        }
        if (ok) return lambda;
    }
    // unknowns: Lambda_{ab} for a < b (skew); conditions: for unfrozen j and
    // all c: sum_a B1(e_j)_a Lambda_{ac} = (1/d_j) (e_j)_c
    const int nu = r * (r - 1) / 2;
    auto unk = [&](int a, int b) {  // a < b
        int idx = 0;
        for (int x = 0; x < r; ++x)
            for (int y = x + 1; y < r; ++y) {
                if (x == a && y == b) return idx;
                ++idx;
            }
        return -1;
    };
    HPoly sys = HPoly::whole(nu);
    for (int j = 0; j < r; ++j) {
        if (seed.frozen.count(j)) continue;
        // B1(e_j) in ambient coordinates: components B(e_j, e_c0) over the
        // initial basis; seeds here are in their initial frame
        VecQ b1(static_cast<size_t>(r));
        for (int c = 0; c < r; ++c) {
            VecZ ec(static_cast<size_t>(r), 0);
            ec[static_cast<size_t>(c)] = 1;
            b1[static_cast<size_t>(c)] =
                seed.multipliers.at(c) * seed.pairing(seed.basis[static_cast<size_t>(j)], ec);
        }
        for (int c = 0; c < r; ++c) {
            VecQ row(static_cast<size_t>(nu), QQ(0));
            for (int a = 0; a < r; ++a) {
                if (a == c) continue;
                int idx = a < c ? unk(a, c) : unk(c, a);
                QQ sgn = a < c ? QQ(1) : QQ(-1);
                row[static_cast<size_t>(idx)] += sgn * b1[static_cast<size_t>(a)];
            }
            QQ rhs = QQ(seed.basis[static_cast<size_t>(j)][static_cast<size_t>(c)]) /
                     seed.multipliers.at(j);
            sys.add_eq(std::move(row), rhs);
        }
    }
    auto chart = solve_equalities(sys);
    if (!chart) throw input_error("not quantizable: no compatible pair exists");
    VecQ sol = chart->x0;  // any solution
    std::vector<VecQ> lambda(static_cast<size_t>(r), VecQ(static_cast<size_t>(r), QQ(0)));
    int idx = 0;
    for (int a = 0; a < r; ++a)
        for (int b = a + 1; b < r; ++b) {
            lambda[static_cast<size_t>(a)][static_cast<size_t>(b)] = sol[static_cast<size_t>(idx)];
            lambda[static_cast<size_t>(b)][static_cast<size_t>(a)] = -sol[static_cast<size_t>(idx)];
            ++idx;
        }
    return lambda;
}

Seed principal_seed(const Seed& seed) {
    const int r = seed.rank;
    Seed out;
    out.rank = 2 * r;
    out.form.assign(static_cast<size_t>(2 * r), VecQ(static_cast<size_t>(2 * r), QQ(0)));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            out.form[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                seed.form[static_cast<size_t>(i)][static_cast<size_t>(j)];
    for (int i = 0; i < r; ++i) {
        out.form[static_cast<size_t>(i)][static_cast<size_t>(r + i)] = 1;
        out.form[static_cast<size_t>(r + i)][static_cast<size_t>(i)] = -1;
    }
    for (int i = 0; i < r; ++i) {
        QQ d = seed.multipliers.count(i) ? seed.multipliers.at(i) : QQ(1);
        out.multipliers[i] = d;
        out.multipliers[r + i] = d;
    }
    out.frozen = seed.frozen;
    for (int i = 0; i < r; ++i) out.frozen.insert(r + i);
    for (int i = 0; i < 2 * r; ++i) {
        VecZ e(static_cast<size_t>(2 * r), 0);
        e[static_cast<size_t>(i)] = 1;
        out.basis.push_back(std::move(e));
    }
    out.validate();
    return out;
}

namespace {

// B1(v) of a seed in ambient M coordinates.  B(v, w) = sum_j w'_j d_j {v, e_j}
// where w = sum w'_j e_j in the seed's own basis, so the initial-frame
// components require expanding the initial basis vectors in the seed basis.
VecZ b1_vector(const Seed& seed, const VecZ& v) {
    const int r = seed.rank;
    // inverse of the basis matrix: columns of e^{(0)}_c in the e'-basis
    std::vector<VecQ> inv(static_cast<size_t>(r), VecQ(static_cast<size_t>(r), QQ(0)));
    for (int c = 0; c < r; ++c) {
        HPoly sys = HPoly::whole(r);
        for (int row = 0; row < r; ++row) {
            VecQ a(static_cast<size_t>(r));
            for (int i = 0; i < r; ++i)
                a[static_cast<size_t>(i)] = QQ(seed.basis[static_cast<size_t>(i)][static_cast<size_t>(row)]);
            sys.add_eq(std::move(a), QQ(row == c ? 1 : 0));
        }
        auto chart = solve_equalities(sys);
        if (!chart || chart->ydim() != 0) throw std::logic_error("seed basis is degenerate");
        inv[static_cast<size_t>(c)] = chart->x0;
    }
    VecZ out(static_cast<size_t>(r), 0);
    for (int c = 0; c < r; ++c) {
        QQ acc = 0;
        for (int j = 0; j < r; ++j) {
            const QQ& coord = inv[static_cast<size_t>(c)][static_cast<size_t>(j)];
            if (coord == 0) continue;
            acc += coord * seed.multipliers.at(j) * seed.pairing(v, seed.basis[static_cast<size_t>(j)]);
        }
        out[static_cast<size_t>(c)] = long_value(acc);
    }
    return out;
}

}  // namespace

VecZ ClusterSession::to_session(const VecZ& ambient) const {
    // solve sum c_i fvec_i = ambient over the rationals; must be integral
    const int r = lat.rank;
    HPoly sys = HPoly::whole(r);
    for (int row = 0; row < r; ++row) {
        VecQ a(static_cast<size_t>(r));
        for (int i = 0; i < r; ++i) a[static_cast<size_t>(i)] = QQ(fvec[static_cast<size_t>(i)][static_cast<size_t>(row)]);
        sys.add_eq(std::move(a), QQ(ambient[static_cast<size_t>(row)]));
    }
    auto chart = solve_equalities(sys);
    if (!chart || chart->ydim() != 0)
        throw input_error("exponent is not in the session frame lattice");
    VecZ out(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) out[static_cast<size_t>(i)] = long_value(chart->x0[static_cast<size_t>(i)]);
    return out;
}

VecZ ClusterSession::to_ambient(const VecZ& session) const {
    VecZ out(static_cast<size_t>(lat.rank), 0);
    for (size_t i = 0; i < fvec.size(); ++i) out = add(out, scale(fvec[i], session[i]));
    return out;
}

ClusterSession make_session(const Seed& seed, Side side) {
    ClusterSession ses;
    ses.seed = seed;
    ses.side = side;
    const int r = seed.rank;
    std::vector<VecQ> w(static_cast<size_t>(r), VecQ(static_cast<size_t>(r), QQ(0)));
    if (side == Side::X) {
        for (int i = 0; i < r; ++i) ses.fvec.push_back(seed.basis[static_cast<size_t>(i)]);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                w[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    seed.pairing(seed.basis[static_cast<size_t>(i)], seed.basis[static_cast<size_t>(j)]);
    } else {
        ses.lambda = compatible_pair(seed);
        // f_i := B1(e_i); requires a nondegenerate pairing so the f's span M
        for (int i = 0; i < r; ++i)
            ses.fvec.push_back(b1_vector(seed, seed.basis[static_cast<size_t>(i)]));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                QQ s = 0;
                for (int a = 0; a < r; ++a)
                    for (int b = 0; b < r; ++b)
                        s += QQ(ses.fvec[static_cast<size_t>(i)][static_cast<size_t>(a)] *
                                ses.fvec[static_cast<size_t>(j)][static_cast<size_t>(b)]) *
                             ses.lambda[static_cast<size_t>(a)][static_cast<size_t>(b)];
                w[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
            }
        // the f's must form a basis (Lambda nondegenerate route)
        HPoly probe = HPoly::whole(r);
        for (int row = 0; row < r; ++row) {
            VecQ a(static_cast<size_t>(r));
            for (int i = 0; i < r; ++i) a[static_cast<size_t>(i)] = QQ(ses.fvec[static_cast<size_t>(i)][static_cast<size_t>(row)]);
            probe.add_eq(std::move(a), QQ(0));
        }
        auto chart = solve_equalities(probe);
        if (!chart || chart->ydim() != 0)
            throw input_error("A-side session needs B_1 to be injective (degenerate principal part)");
    }
    ses.lat = make_lattice(r, w, seed.multipliers, seed.frozen);
    return ses;
}

ScatteringDiagram cluster_initial_diagram(const ClusterSession& ses, long order) {
    // Both sides carry the dilogarithm wall functions: with the path-product
    // orientation used here, the A-side inverse of the reference formula is
    // absorbed into the crossing conventions (the finite-type chamber
    // structure pins the sign).
    return initial_diagram(ses.lat, order);
}

std::map<VecZ, QQ> classical_mutation_pullback(const Seed& seed, int j, Side side,
                                               const VecZ& ambient_exp, long order) {
    // X: z^n -> z^n (1 + z^{e_j})^{-B(n, e_j)};  A: z^m -> z^m (1 + z^{B1(e_j)})^{-<e_j, m>}
    const VecZ& ej = seed.basis[static_cast<size_t>(j)];
    VecZ step;
    QQ expnt;
    if (side == Side::X) {
        step = ej;
        expnt = -seed.multipliers.at(j) * seed.pairing(ambient_exp, ej);
    } else {
        step = b1_vector(seed, ej);
        expnt = QQ(-dot(ej, ambient_exp));
    }
    long e = long_value(expnt);
    std::map<VecZ, QQ> out;
    QQ coeff = 1;
    for (long k = 0; k <= order; ++k) {
        if (coeff != 0) out[add(ambient_exp, scale(step, k))] = coeff;
        QQ f(e - k, k + 1);
        f.canonicalize();
        coeff *= f;
    }
    return out;
}

namespace {

// coefficients of P^{expo} truncated at x^kmax, with
// P = prod_{a=1}^{A} (1 + q^{sigma(2a-1)/c} x) and expo in {+1, -1}
std::vector<QRational> dilog_product(const GradedLattice& lat, long A, int sigma, const QQ& c,
                                     int expo, long kmax) {
    std::vector<QRational> poly{QRational(QQ(1), lat.scale)};
    for (long a = 1; a <= A; ++a) {
        QQ e = QQ(sigma) * QQ(2 * a - 1) / c;
        QRational qe = QRational::q_power(e, lat.scale);
        std::vector<QRational> next(poly.size() + 1, QRational(QQ(0), lat.scale));
        for (size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] += poly[i] * qe;
        }
        poly = std::move(next);
    }
    poly.resize(static_cast<size_t>(kmax) + 1, QRational(QQ(0), lat.scale));
    if (expo > 0) return poly;
    std::vector<QRational> inv(static_cast<size_t>(kmax) + 1, QRational(QQ(0), lat.scale));
    inv[0] = QRational(QQ(1), lat.scale);
    for (long m = 1; m <= kmax; ++m) {
        QRational acc(QQ(0), lat.scale);
        for (long i = 1; i <= m; ++i)
            acc += poly[static_cast<size_t>(i)] * inv[static_cast<size_t>(m - i)];
        inv[static_cast<size_t>(m)] = -acc;
    }
    return inv;
}

}  // namespace

Series quantum_mutation_pullback(const ClusterSession& ses, const Seed& at_seed, int j,
                                 const VecZ& ambient_exp, long order) {
    const GradedLattice& lat = ses.lat;
    const VecZ& ej = at_seed.basis[static_cast<size_t>(j)];
    QQ dj = at_seed.multipliers.at(j);
    VecZ psi_amb, n_amb = ambient_exp;
    QQ pairing;  // W(n, psi) in the relevant torus
    int flip;    // +1: apply m*, -1: apply the inverse (the A-side mutation)
    if (ses.side == Side::X) {
        psi_amb = ej;
        pairing = at_seed.pairing(ambient_exp, ej);
        flip = 1;
    } else {
        psi_amb = b1_vector(at_seed, ej);
        // Lambda(m, B1(e_j)) on M
        VecZ ps = ses.to_session(psi_amb);
        VecZ ns = ses.to_session(ambient_exp);
        pairing = lat.form(ns, ps);
        flip = -1;
    }
    int sigma = pairing > 0 ? 1 : (pairing < 0 ? -1 : 0);
    VecZ psi_ses = ses.to_session(psi_amb);
    VecZ n_ses = ses.to_session(n_amb);
    Series out = series_zero(lat, n_ses, order);
    if (sigma == 0) {
        out.add_term(lat, n_ses, 0, QRational(QQ(1), lat.scale));
        return out;
    }
    QQ Aq = dj * abs(pairing);
    long A = long_value(Aq);
    // factor exponent: -sign(W(n,psi)) for m*, +sign for the inverse map
    int expo = -flip * sigma;
    std::vector<QRational> coeffs = dilog_product(lat, A, sigma, dj, expo, order);
    for (long k = 0; k < static_cast<long>(coeffs.size()); ++k) {
        if (coeffs[static_cast<size_t>(k)].is_zero()) continue;
        // (x^k) z^n with x = z^psi: commutation factor q^{W(k psi, n)}
        QRational c = coeffs[static_cast<size_t>(k)] *
                      QRational::s_power(lat.form_scaled(scale(psi_ses, k), n_ses), lat.scale);
        out.add_term(lat, add(n_ses, scale(psi_ses, k)), 0, c);
    }
    return out;
}

Series word_pullback(const ClusterSession& ses, const std::vector<int>& word,
                     const VecZ& ambient_exp, long order) {
    // composite pullback (mu_{j1} o ... o mu_{jl})^* = mu*_{j1} o ... applied
    // from the innermost seed outward
    std::vector<Seed> seeds{ses.seed};
    for (int j : word) seeds.push_back(mutate(seeds.back(), j));
    const GradedLattice& lat = ses.lat;
    Series cur = series_monomial(lat, ses.to_session(ambient_exp), QRational(QQ(1), lat.scale), order);
    for (size_t step = word.size(); step-- > 0;) {
        const Seed& at = seeds[step];
        int j = word[step];
        Series next = series_zero(lat, cur.base, order);
        for (const auto& [key, c] : cur.terms) {
            Series piece = quantum_mutation_pullback(ses, at, j, ses.to_ambient(key.e), order);
            for (const auto& [k2, c2] : piece.terms) next.add_term(lat, k2.e, 0, c * c2);
        }
        cur = next;
    }
    return cur;
}

namespace {

// session-frame chamber normals of the seed reached after some mutations.
// On the A side the cluster chamber of the base seed is the negative cone of
// the f-functionals (where the base cluster monomials are straight thetas).
std::vector<VecQ> chamber_normals(const ClusterSession& ses, const Seed& at) {
    std::vector<VecQ> out;
    for (int i = 0; i < ses.lat.rank; ++i) {
        if (ses.seed.frozen.count(i)) continue;
        VecZ fi_amb = ses.side == Side::X ? at.basis[static_cast<size_t>(i)]
                                          : b1_vector(at, at.basis[static_cast<size_t>(i)]);
        VecZ fi = ses.to_session(fi_amb);
        VecQ a(static_cast<size_t>(ses.lat.rank));
        QQ sgn = ses.side == Side::X ? QQ(1) : QQ(-1);
        for (int c = 0; c < ses.lat.rank; ++c)
            a[static_cast<size_t>(c)] = sgn * QQ(fi[static_cast<size_t>(c)]);
        out.push_back(std::move(a));
    }
    return out;
}

bool off_all_walls(const ScatteringDiagram& diag, const VecQ& x) {
    for (size_t i = 0; i < diag.wall_count(); ++i) {
        const WallSupport& s =
            diag.kind == DiagramKind::standard ? diag.walls[i].support : diag.nwalls[i].support;
        if (s.to_poly(static_cast<int>(x.size())).contains(x)) return false;
    }
    return true;
}

}  // namespace

VecQ chamber_point(const ClusterSession& ses, const ScatteringDiagram& diag,
                   const std::vector<int>& word, Rng& rng) {
    const int r = ses.lat.rank;
    // start: generic strict point of the base chamber
    std::vector<VecQ> normals = chamber_normals(ses, ses.seed);
    std::vector<LinCond> sys;
    for (const VecQ& a : normals) sys.push_back({a, QQ(0), true});
    VecQ x;
    for (int attempt = 0;; ++attempt) {
        if (attempt >= 64) throw budget_error("no generic base chamber point found");
        auto y = fm_strict_point(sys, r);
        if (!y) throw input_error("empty base chamber");
        x = *y;
        VecQ eps = rng.generic_point(static_cast<size_t>(r), 1);
        for (int c = 0; c < r; ++c) x[static_cast<size_t>(c)] += eps[static_cast<size_t>(c)] / 1000;
        bool ok = off_all_walls(diag, x);
        for (const LinCond& c : sys)
            if (dot(c.a, x) <= 0) ok = false;
        if (ok) break;
    }
    // walk chamber to chamber through the shared facet
    Seed at = ses.seed;
    std::vector<int> unfrozen;
    for (int i = 0; i < r; ++i)
        if (!ses.seed.frozen.count(i)) unfrozen.push_back(i);
    for (int j : word) {
        Seed next = mutate(at, j);
        std::vector<VecQ> cur_n = chamber_normals(ses, at);
        std::vector<VecQ> nxt_n = chamber_normals(ses, next);
        int jslot = -1;
        for (size_t sIdx = 0; sIdx < unfrozen.size(); ++sIdx)
            if (unfrozen[sIdx] == j) jslot = static_cast<int>(sIdx);
        if (jslot < 0) throw input_error("mutation index is frozen");
        // relative-interior point of the shared facet
        HPoly facet = HPoly::whole(r);
        facet.add_eq(cur_n[static_cast<size_t>(jslot)], QQ(0));
        for (size_t sIdx = 0; sIdx < cur_n.size(); ++sIdx)
            if (static_cast<int>(sIdx) != jslot) facet.ge.push_back({cur_n[sIdx], QQ(0), true});
        for (size_t sIdx = 0; sIdx < nxt_n.size(); ++sIdx)
            if (static_cast<int>(sIdx) != jslot) facet.ge.push_back({nxt_n[sIdx], QQ(0), true});
        VecQ y;
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 64) throw budget_error("no generic facet point found");
            auto fy = relative_interior_point(facet);
            if (!fy) throw input_error("cluster chambers do not share the expected facet");
            y = *fy;
            // keep y off every wall except those through the facet carrier
            bool ok = true;
            for (size_t i = 0; i < diag.wall_count(); ++i) {
                const WallSupport& sP = diag.kind == DiagramKind::standard
                                            ? diag.walls[i].support
                                            : diag.nwalls[i].support;
                HPoly wp = sP.to_poly(r);
                if (!wp.contains(y)) continue;
                // crossing walls must be parallel to the facet normal
                VecQ nw(sP.normal.size());
                for (size_t c2 = 0; c2 < sP.normal.size(); ++c2) nw[c2] = QQ(sP.normal[c2]);
                const VecQ& fn = cur_n[static_cast<size_t>(jslot)];
                bool parallel = true;
                for (size_t aI = 0; aI < nw.size() && parallel; ++aI)
                    for (size_t bI = aI + 1; bI < nw.size() && parallel; ++bI)
                        if (nw[aI] * fn[bI] != nw[bI] * fn[aI]) parallel = false;
                if (!parallel) ok = false;
                if (!wp.active_at(y).empty()) ok = false;
            }
            if (ok) break;
            // nudge within the facet deterministically
            VecQ eps = rng.generic_point(static_cast<size_t>(r), 1);
            HPoly tightened = facet;
            (void)eps;
            // re-sample by adding a generic strict cut through y
            VecQ a = rng.generic_point(static_cast<size_t>(r), 2);
            facet.ge.push_back({a, dot(a, y), true});
        }
        // step across the facet to the negative side of the j-normal
        const VecQ& fn = cur_n[static_cast<size_t>(jslot)];
        QQ fn2 = dot(fn, fn);
        QQ step(1, 1024);
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 64) throw budget_error("facet step failed to stay generic");
            VecQ cand = y;
            for (int c = 0; c < r; ++c) cand[static_cast<size_t>(c)] -= step * fn[static_cast<size_t>(c)] / fn2;
            bool ok = off_all_walls(diag, cand);
            // inside the next coarse chamber
            for (size_t sIdx = 0; sIdx < nxt_n.size() && ok; ++sIdx)
                if (dot(nxt_n[sIdx], cand) <= 0) ok = false;
            // the step from y crosses only the facet carrier when small enough
            if (ok) {
                x = cand;
                break;
            }
            step /= 16;
        }
        at = next;
    }
    return x;
}

ChamberCheckReport chamber_cluster_check(const ClusterSession& ses, const std::vector<int>& word,
                                         long order, Rng& rng) {
    ScatteringDiagram diag = complete_direct(cluster_initial_diagram(ses, order), order, rng);
    VecQ q_base = chamber_point(ses, diag, {}, rng);
    VecQ q_word = chamber_point(ses, diag, word, rng);
    ChamberCheckReport rep;
    const GradedLattice& lat = ses.lat;
    for (int i = 0; i < lat.rank; ++i) {
        VecZ gen(static_cast<size_t>(lat.rank), 0);
        gen[static_cast<size_t>(i)] = 1;
        // composed pullbacks realize the transport from the word chamber to
        // the base chamber
        PathSpec path{{q_word, q_base}};
        Series transported =
            path_ordered_product(diag, path, TorusMonomial{QRational(QQ(1), lat.scale), gen}, order);
        Series mutated = word_pullback(ses, word, ses.to_ambient(gen), order);
        Series diff = sub(lat, transported, mutated);
        if (!diff.is_zero()) {
            rep.pass = false;
            rep.residuals.emplace_back(gen, std::move(diff));
        }
    }
    return rep;
}

MidTheta mid_theta(const Seed& seed, const VecZ& p, long order, uint64_t sample_seed) {
    const int r = seed.rank;
    Seed prin = principal_seed(seed);
    ClusterSession ses = make_session(prin, Side::A);
    Rng rng(sample_seed);
    ScatteringDiagram diag = complete_direct(cluster_initial_diagram(ses, order + 2), order + 2, rng);
    ClassicalDiagram cd = classical_limit_diagram(diag);
    // section: p in M lifts to (p, 0) in M + N = ambient of the session
    VecZ amb(static_cast<size_t>(2 * r), 0);
    for (int i = 0; i < r; ++i) amb[static_cast<size_t>(i)] = p[static_cast<size_t>(i)];
    VecZ pses = ses.to_session(amb);
    // base point inside the base cluster chamber: the expansion is then in the
    // cluster monomials of the base seed
    VecQ Q = chamber_point(ses, diag, {}, rng);
    auto run = [&](long ord) {
        std::map<VecZ, std::map<VecZ, QQ>> raw;
        for (const auto& [e, c] : theta_classical(cd, pses, Q, ord)) {
            VecZ a = ses.to_ambient(e);
            VecZ mpart(a.begin(), a.begin() + r);
            VecZ npart(a.begin() + r, a.end());
            raw[mpart][npart] += c;
        }
        return raw;
    };
    MidTheta out;
    out.raw = run(order);
    // finiteness probe: no new terms may appear two orders higher
    out.stable = (out.raw == run(order + 2));
    for (auto& [m, layer] : out.raw) {
        QQ total = 0;
        for (auto& [n, c] : layer) total += c;
        if (total != 0) out.coeffs[m] = total;
    }
    return out;
}

std::map<VecZ, QQ> mid_theta_product(const Seed& seed, const std::vector<VecZ>& ps, long order,
                                     uint64_t sample_seed) {
    std::map<VecZ, QQ> acc;
    acc[VecZ(static_cast<size_t>(seed.rank), 0)] = 1;
    for (const VecZ& p : ps) {
        MidTheta th = mid_theta(seed, p, order, sample_seed);
        std::map<VecZ, QQ> next;
        for (const auto& [ea, ca] : acc)
            for (const auto& [eb, cb] : th.coeffs) next[add(ea, eb)] += ca * cb;
        for (auto it = next.begin(); it != next.end();)
            it = it->second == 0 ? next.erase(it) : std::next(it);
        acc = std::move(next);
    }
    return acc;
}

}  // namespace qscat
