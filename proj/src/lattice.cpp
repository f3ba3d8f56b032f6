#include "qscat/lattice.hpp"

#include "qscat/polyhedron.hpp"

#include <algorithm>

namespace qscat {

std::vector<int> GradedLattice::unfrozen() const {
    std::vector<int> out;
    for (int i = 0; i < rank; ++i)
        if (!is_frozen(i)) out.push_back(i);
    return out;
}

const QQ& GradedLattice::multiplier(int i) const {
    auto it = multipliers.find(i);
    if (it == multipliers.end())
        throw input_error("multiplier d_" + std::to_string(i + 1) + " not provided");
    return it->second;
}

QQ GradedLattice::form(const VecZ& a, const VecZ& b) const {
    QQ s = 0;
    for (int i = 0; i < rank; ++i) {
        if (a[static_cast<size_t>(i)] == 0) continue;
        for (int j = 0; j < rank; ++j) {
            if (b[static_cast<size_t>(j)] == 0) continue;
            s += QQ(a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)]) *
                 skew[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
    }
    return s;
}

long GradedLattice::form_scaled(const VecZ& a, const VecZ& b) const {
    QQ s = form(a, b) * QQ(scale);
    return long_value(s);
}

VecQ GradedLattice::pi1(const VecZ& n) const {
    VecQ out(static_cast<size_t>(rank), QQ(0));
    for (int j = 0; j < rank; ++j) {
        QQ s = 0;
        for (int i = 0; i < rank; ++i)
            if (n[static_cast<size_t>(i)] != 0)
                s += QQ(n[static_cast<size_t>(i)]) * skew[static_cast<size_t>(i)][static_cast<size_t>(j)];
        out[static_cast<size_t>(j)] = s;
    }
    return out;
}

bool GradedLattice::in_Nplus(const VecZ& n) const {
    bool nonzero = false;
    for (int i = 0; i < rank; ++i) {
        long c = n[static_cast<size_t>(i)];
        if (is_frozen(i)) {
            if (c != 0) return false;
        } else {
            if (c < 0) return false;
            if (c > 0) nonzero = true;
        }
    }
    return nonzero;
}

bool GradedLattice::in_Nplus0(const VecZ& n) const { return is_zero(n) || in_Nplus(n); }

bool GradedLattice::in_ker_pi1(const VecZ& n) const { return is_zero(pi1(n)); }

void GradedLattice::validate() const {
    if (rank <= 0) throw input_error("lattice rank must be positive");
    if (static_cast<int>(skew.size()) != rank) throw input_error("skew form must be rank x rank");
    for (const VecQ& row : skew)
        if (static_cast<int>(row.size()) != rank) throw input_error("skew form must be rank x rank");
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j)
            if (skew[static_cast<size_t>(i)][static_cast<size_t>(j)] !=
                -skew[static_cast<size_t>(j)][static_cast<size_t>(i)])
                throw input_error("form is not skew-symmetric");
    for (const auto& [i, d] : multipliers) {
        if (i < 0 || i >= rank) throw input_error("multiplier index out of range");
        if (d <= 0) throw input_error("multipliers must be positive");
    }
    for (int i : frozen)
        if (i < 0 || i >= rank) throw input_error("frozen index out of range");
    // D W integral
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j)
            if (!is_integer(skew[static_cast<size_t>(i)][static_cast<size_t>(j)] * QQ(scale)))
                throw scale_error("scale does not clear the form denominators");
    // d_i pi1(f_i) integral for unfrozen i (integrality of the standard walls)
    for (int i : unfrozen()) {
        if (!multipliers.count(i)) continue;
        VecZ fi(static_cast<size_t>(rank), 0);
        fi[static_cast<size_t>(i)] = 1;
        VecQ row = pi1(fi);
        for (const QQ& c : row)
            if (!is_integer(c * multiplier(i)))
                throw input_error("d_i * pi1(f_i) must be an integer covector (i=" +
                                  std::to_string(i + 1) + ")");
    }
}

long d_deg(const VecZ& n) {
    long s = 0;
    for (long c : n) s += c;
    return s;
}

long vec_index(const VecZ& v) {
    long g = 0;
    for (long c : v) g = gcd_long(g, c);
    if (g == 0) throw input_error("index of the zero vector");
    return g;
}

VecZ primitive_part(const VecZ& v) {
    long g = vec_index(v);
    VecZ r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = v[i] / g;
    return r;
}

GradedLattice make_lattice(int rank, const std::vector<VecQ>& skew,
                           const std::map<int, QQ>& multipliers, const std::set<int>& frozen) {
    GradedLattice lat;
    lat.rank = rank;
    lat.skew = skew;
    lat.multipliers = multipliers;
    lat.frozen = frozen;
    // Session scale: least positive D with D*W integral and num(d_i) | D, so
    // that q^w and q^(w/d_i) are monomials in s = q^(1/D) whenever needed.
    ZZ D = 1;
    for (const VecQ& row : skew)
        for (const QQ& c : row) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), c.get_den().get_mpz_t());
    for (const auto& [i, d] : multipliers)
        mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), d.get_num().get_mpz_t());
    if (!D.fits_slong_p()) throw input_error("session scale overflow");
    lat.scale = D.get_si();
    lat.validate();
    return lat;
}

HnfResult hnf_rows(std::vector<std::vector<ZZ>> A) {
    const int m = static_cast<int>(A.size());
    const int n = m ? static_cast<int>(A[0].size()) : 0;
    HnfResult res;
    res.T.assign(static_cast<size_t>(m), std::vector<ZZ>(static_cast<size_t>(m), ZZ(0)));
    for (int i = 0; i < m; ++i) res.T[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;

    auto row_axpy = [&](int dst, int src, const ZZ& c) {  // row[dst] -= c * row[src]
        for (int j = 0; j < n; ++j) A[static_cast<size_t>(dst)][static_cast<size_t>(j)] -=
            c * A[static_cast<size_t>(src)][static_cast<size_t>(j)];
        for (int j = 0; j < m; ++j) res.T[static_cast<size_t>(dst)][static_cast<size_t>(j)] -=
            c * res.T[static_cast<size_t>(src)][static_cast<size_t>(j)];
    };
    auto row_swap = [&](int a, int b) {
        std::swap(A[static_cast<size_t>(a)], A[static_cast<size_t>(b)]);
        std::swap(res.T[static_cast<size_t>(a)], res.T[static_cast<size_t>(b)]);
    };
    auto row_neg = [&](int a) {
        for (auto& x : A[static_cast<size_t>(a)]) x = -x;
        for (auto& x : res.T[static_cast<size_t>(a)]) x = -x;
    };

    int r = 0;
    for (int col = 0; col < n && r < m; ++col) {
        // gcd elimination below row r in this column
        while (true) {
            int piv = -1;
            for (int i = r; i < m; ++i)
                if (A[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0) {
                    if (piv == -1 ||
                        cmp(abs(A[static_cast<size_t>(i)][static_cast<size_t>(col)]),
                            abs(A[static_cast<size_t>(piv)][static_cast<size_t>(col)])) < 0)
                        piv = i;
                }
            if (piv == -1) break;
            row_swap(r, piv);
            bool clean = true;
            for (int i = r + 1; i < m; ++i) {
                ZZ& a = A[static_cast<size_t>(i)][static_cast<size_t>(col)];
                if (a != 0) {
                    ZZ q;
                    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(),
                               A[static_cast<size_t>(r)][static_cast<size_t>(col)].get_mpz_t());
                    row_axpy(i, r, q);
                    if (A[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0) clean = false;
                }
            }
            if (clean) break;
        }
        if (A[static_cast<size_t>(r)][static_cast<size_t>(col)] == 0) continue;
        if (A[static_cast<size_t>(r)][static_cast<size_t>(col)] < 0) row_neg(r);
        // reduce rows above
        for (int i = 0; i < r; ++i) {
            ZZ q;
            mpz_fdiv_q(q.get_mpz_t(), A[static_cast<size_t>(i)][static_cast<size_t>(col)].get_mpz_t(),
                       A[static_cast<size_t>(r)][static_cast<size_t>(col)].get_mpz_t());
            if (q != 0) row_axpy(i, r, q);
        }
        ++r;
    }
    res.rank = r;
    res.H = std::move(A);
    return res;
}

ImageLattice image_lattice(const GradedLattice& lat) {
    const int r = lat.rank;
    std::vector<std::vector<ZZ>> A(static_cast<size_t>(r), std::vector<ZZ>(static_cast<size_t>(r)));
    for (int i = 0; i < r; ++i) {
        VecZ fi(static_cast<size_t>(r), 0);
        fi[static_cast<size_t>(i)] = 1;
        VecQ row = lat.pi1(fi);
        for (int j = 0; j < r; ++j) {
            QQ v = row[static_cast<size_t>(j)] * QQ(lat.scale);
            A[static_cast<size_t>(i)][static_cast<size_t>(j)] = integer_value(v);
        }
    }
    HnfResult h = hnf_rows(std::move(A));
    ImageLattice out;
    out.rank = h.rank;
    out.ambient = r;
    for (int i = 0; i < h.rank; ++i) {
        VecQ b(static_cast<size_t>(r));
        for (int j = 0; j < r; ++j)
            b[static_cast<size_t>(j)] = QQ(h.H[static_cast<size_t>(i)][static_cast<size_t>(j)]) / QQ(lat.scale);
        out.basis.push_back(std::move(b));
        VecZ lift(static_cast<size_t>(r));
        for (int j = 0; j < r; ++j) {
            ZZ t = h.T[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (!t.fits_slong_p()) throw input_error("image lattice lift overflow");
            lift[static_cast<size_t>(j)] = t.get_si();
        }
        out.lifts.push_back(std::move(lift));
    }
    out.induced_form.assign(static_cast<size_t>(h.rank), VecQ(static_cast<size_t>(h.rank), QQ(0)));
    for (int i = 0; i < h.rank; ++i)
        for (int j = 0; j < h.rank; ++j)
            out.induced_form[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                lat.form(out.lifts[static_cast<size_t>(i)], out.lifts[static_cast<size_t>(j)]);
    return out;
}

VecQ ImageLattice::forward_q(const GradedLattice& lat, const VecQ& covector) const {
    // solve coords * basis = covector by back-substitution on the echelon basis
    VecQ rem = covector;
    VecQ coords(static_cast<size_t>(rank), QQ(0));
    for (int i = 0; i < rank; ++i) {
        // pivot column of basis[i]
        int pc = -1;
        for (int j = 0; j < static_cast<int>(rem.size()); ++j)
            if (basis[static_cast<size_t>(i)][static_cast<size_t>(j)] != 0) {
                pc = j;
                break;
            }
        if (pc < 0) throw std::logic_error("degenerate image basis");
        QQ c = rem[static_cast<size_t>(pc)] / basis[static_cast<size_t>(i)][static_cast<size_t>(pc)];
        coords[static_cast<size_t>(i)] = c;
        if (c != 0)
            for (size_t j = 0; j < rem.size(); ++j) rem[j] -= c * basis[static_cast<size_t>(i)][j];
    }
    if (!qscat::is_zero(rem)) throw input_error("covector is not in the image lattice span");
    return coords;
}

VecZ ImageLattice::forward(const GradedLattice& lat, const VecZ& n) const {
    VecQ coords = forward_q(lat, lat.pi1(n));
    VecZ out(coords.size());
    for (size_t i = 0; i < coords.size(); ++i) out[i] = long_value(coords[i]);
    return out;
}

VecQ ImageLattice::embed(const VecQ& mbar) const {
    VecQ out(static_cast<size_t>(ambient), QQ(0));
    for (int i = 0; i < rank; ++i)
        for (size_t j = 0; j < out.size(); ++j)
            out[j] += mbar[static_cast<size_t>(i)] * basis[static_cast<size_t>(i)][j];
    return out;
}

MonoidSpec MonoidSpec::standard(const GradedLattice& lat) {
    MonoidSpec spec;
    for (int i = 0; i < lat.rank; ++i) {
        VecZ e(static_cast<size_t>(lat.rank), 0);
        e[static_cast<size_t>(i)] = 1;
        spec.generators.push_back(e);
        if (lat.is_frozen(i)) {
            e[static_cast<size_t>(i)] = -1;
            spec.generators.push_back(e);
        }
    }
    return spec;
}

namespace {
// n in the rational cone spanned by gens (exact feasibility in lambda-space).
// Monoid membership agrees with this for the saturated cones used here.
bool cone_member(const std::vector<VecZ>& gens, const VecZ& n) {
    size_t dim = n.size();
    HPoly sys = HPoly::whole(static_cast<int>(gens.size()));
    for (size_t i = 0; i < dim; ++i) {
        VecQ row(gens.size());
        for (size_t g = 0; g < gens.size(); ++g) row[g] = QQ(gens[g][i]);
        sys.add_eq(std::move(row), QQ(n[i]));
    }
    for (size_t g = 0; g < gens.size(); ++g) {
        VecQ row(gens.size(), QQ(0));
        row[g] = 1;
        sys.add_ge(std::move(row), QQ(0));
    }
    return nonempty(sys);
}
}  // namespace

bool MonoidSpec::contains(const VecZ& n) const { return cone_member(generators, n); }

bool MonoidSpec::invertible(const GradedLattice& lat, const VecZ& n) const {
    VecZ neg(n.size());
    for (size_t i = 0; i < n.size(); ++i) neg[i] = -n[i];
    return contains(n) && contains(neg);
}

bool MonoidSpec::in_ideal(const GradedLattice& lat, const VecZ& n) const {
    return contains(n) && !invertible(lat, n);
}

bool MonoidSpec::in_k_ideal(const GradedLattice& lat, const VecZ& n, long k) const {
    if (!contains(n)) return false;
    long du = 0;
    for (int i = 0; i < lat.rank; ++i)
        if (!lat.is_frozen(i)) du += n[static_cast<size_t>(i)];
    return du >= k;
}

}  // namespace qscat
