#include "qscat/frobenius.hpp"

#include <sstream>

namespace qscat {

namespace {

bool denominator_coprime(const QQ& x, long p) { return x.get_den() % p != 0; }

bool congruent_mod(const QQ& a, const QQ& b, long p) {
    QQ d = a - b;
    if (d == 0) return true;
    if (d.get_den() % p == 0) throw input_error("denominator not coprime to the prime");
    return d.get_num() % p == 0;
}

std::string qq_str(const QQ& x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

FrobeniusReport classical_frobenius_check(const ScatteringDiagram& diag, const VecZ& u, long prime,
                                          const VecQ& Q, long order) {
    FrobeniusReport rep;
    rep.prime = prime;
    rep.order = order;
    ClassicalDiagram cd = classical_limit_diagram(diag);
    std::vector<VecZ> copies(static_cast<size_t>(prime), u);
    std::map<VecZ, QQ> power = theta_product_classical(cd, copies, Q, order);
    std::map<VecZ, QQ> scaled = theta_classical(cd, scale(u, prime), Q, order);
    for (const auto& [n, c] : power)
        if (!denominator_coprime(c, prime))
            throw input_error("theta coefficient denominator not coprime to p");
    for (const auto& [n, c] : scaled)
        if (!denominator_coprime(c, prime))
            throw input_error("theta coefficient denominator not coprime to p");
    std::set<VecZ> support;
    VecZ pu = scale(u, prime);
    for (const auto& [n, c] : power)
        if (d_deg(sub(n, pu)) <= order) support.insert(n);
    for (const auto& [n, c] : scaled)
        if (d_deg(sub(n, pu)) <= order) support.insert(n);
    for (const VecZ& n : support) {
        QQ a = power.count(n) ? power.at(n) : QQ(0);
        QQ b = scaled.count(n) ? scaled.at(n) : QQ(0);
        FrobeniusEntry e;
        e.exponent = n;
        e.lhs = qq_str(a);
        e.rhs = qq_str(b);
        e.match = congruent_mod(a, b, prime);
        if (!e.match) rep.pass = false;
        rep.table.push_back(std::move(e));
    }
    return rep;
}

long frobenius_root_modulus(const GradedLattice& lat, long k) {
    if (k <= 0 || k % 2 == 0) throw input_error("the quantum Frobenius check needs odd k");
    const long D = lat.scale;
    std::vector<long> exps{D};
    for (int i : lat.unfrozen()) {
        QQ e = QQ(D) / lat.multiplier(i);
        exps.push_back(long_value(e));  // integral by the session scale choice
    }
    for (long m = k; m <= 2 * k * D; ++m) {
        bool ok = true;
        for (long e : exps)
            if (m / gcd_long(m, e) != k) ok = false;
        if (ok) return m;
    }
    throw input_error("no admissible root-of-unity specialization for this seed");
}

FrobeniusReport quantum_frobenius_check(const ScatteringDiagram& diag, const VecZ& u, long k,
                                        const VecQ& Q, long order) {
    const GradedLattice& lat = diag.lat;
    FrobeniusReport rep;
    rep.root_order = k;
    rep.order = order;
    rep.cyclo_modulus = frobenius_root_modulus(lat, k);
    const long m = rep.cyclo_modulus;
    VecZ ku = scale(u, k);
    Series quantum = theta(diag, ku, Q, order);
    ClassicalDiagram cd = classical_limit_diagram(diag);
    std::map<VecZ, QQ> classical = theta_classical(cd, u, Q, order / k);
    std::set<VecZ> support;
    for (const auto& [key, c] : quantum.terms) support.insert(key.e);
    for (const auto& [n, c] : classical) support.insert(scale(n, k));
    for (const VecZ& n : support) {
        QRational cq = quantum.coeff(n);
        CyclotomicElement lhs = eval_at_root(cq, m);  // throws pole_error if outside k_q^o
        bool divisible = true;
        VecZ base = n;
        for (size_t i = 0; i < n.size() && divisible; ++i)
            if (n[i] % k != 0) divisible = false;
        CyclotomicElement rhs = CyclotomicElement::zero(m);
        if (divisible) {
            for (size_t i = 0; i < n.size(); ++i) base[i] = n[i] / k;
            auto it = classical.find(base);
            if (it != classical.end()) {
                VecQ coords(static_cast<size_t>(cyclotomic_degree(m)), QQ(0));
                coords[0] = it->second;
                rhs = CyclotomicElement(m, coords);
            }
        }
        FrobeniusEntry e;
        e.exponent = n;
        e.lhs = lhs.to_string();
        e.rhs = rhs.to_string();
        e.match = (lhs == rhs);
        if (!e.match) rep.pass = false;
        rep.table.push_back(std::move(e));
    }
    return rep;
}

FrobeniusTreeScan frobenius_tree_scan(const GradedLattice& lat, const VecZ& u, long k,
                                      const VecQ& Q, long order, uint64_t seed) {
    FrobeniusTreeScan scan;
    const long m = frobenius_root_modulus(lat, k);
    VecZ ku = scale(u, k);
    long copies = order;
    ScatteringDiagram pert = make_trop_diagram(lat, order, std::max(copies, 1L), seed);
    RootSpec root;
    root.point = Q;
    // all exponents within the tropical budget
    std::vector<int> uf = lat.unfrozen();
    std::vector<VecZ> deltas;
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
    for (const VecZ& delta : deltas) {
        VecZ n = add(ku, delta);
        for (const WeightVector& ww : weight_vectors_for(lat, {ku}, n)) {
            QRational rw = r_weight(lat, ww);
            for (const TropicalTree& t : enumerate_trop(pert, {ku}, ww, root, order)) {
                QRational contribution = mult_q(lat, t) * rw;
                contribution.mul_scalar(QQ(1) / ww.aut());
                bool nonzero;
                try {
                    nonzero = !eval_at_root(contribution, m).is_zero();
                } catch (const pole_error&) {
                    nonzero = true;  // a pole is certainly not a vanishing limit
                }
                if (!nonzero) continue;
                ++scan.surviving;
                for (const TropEdge& e : t.edges)
                    if (e.weight % k != 0) scan.all_divisible = false;
            }
        }
    }
    return scan;
}

}  // namespace qscat
