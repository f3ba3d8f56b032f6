#include "qscat/io.hpp"

#include <fstream>

namespace qscat {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Seed seed_from_json(const Json& j) {
    if (!j.contains("rank")) throw input_error("seed JSON needs a rank");
    int rank = j.at("rank").get<int>();
    std::vector<VecQ> form(static_cast<size_t>(rank), VecQ(static_cast<size_t>(rank), QQ(0)));
    if (!j.contains("skew_form")) throw input_error("seed JSON needs skew_form");
    const Json& sf = j.at("skew_form");
    if (static_cast<int>(sf.size()) != rank) throw input_error("skew_form must be rank x rank");
    for (int i = 0; i < rank; ++i)
        for (int c = 0; c < rank; ++c)
            form[static_cast<size_t>(i)][static_cast<size_t>(c)] =
                parse_rational(sf.at(static_cast<size_t>(i)).at(static_cast<size_t>(c)).get<std::string>());
    std::map<int, QQ> mult;
    if (j.contains("multipliers"))
        for (auto it = j.at("multipliers").begin(); it != j.at("multipliers").end(); ++it) {
            int idx = std::stoi(it.key());
            mult[idx - 1] = parse_rational(it.value().get<std::string>());
        }
    std::set<int> frozen;
    if (j.contains("frozen"))
        for (const auto& f : j.at("frozen")) frozen.insert(f.get<int>() - 1);
    return make_seed(rank, std::move(form), std::move(mult), std::move(frozen));
}

Json seed_to_json(const Seed& s) {
    Json j;
    j["rank"] = s.rank;
    Json frozen = Json::array();
    for (int f : s.frozen) frozen.push_back(f + 1);
    j["frozen"] = frozen;
    Json sf = Json::array();
    for (const VecQ& row : s.form) {
        Json r = Json::array();
        for (const QQ& x : row) r.push_back(to_string(x));
        sf.push_back(r);
    }
    j["skew_form"] = sf;
    Json mult = Json::object();
    for (const auto& [i, d] : s.multipliers) mult[std::to_string(i + 1)] = to_string(d);
    j["multipliers"] = mult;
    return j;
}

Seed load_seed(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open seed file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw input_error("bad seed JSON: " + std::string(e.what()));
    }
    return seed_from_json(j);
}

GradedLattice lattice_from_json(const Json& j) {
    Seed s = seed_from_json(j);
    return make_lattice(s.rank, s.form, s.multipliers, s.frozen);
}

Json lattice_to_json(const GradedLattice& lat) {
    Json j;
    j["rank"] = lat.rank;
    Json frozen = Json::array();
    for (int f : lat.frozen) frozen.push_back(f + 1);
    j["frozen"] = frozen;
    Json sf = Json::array();
    for (const VecQ& row : lat.skew) {
        Json r = Json::array();
        for (const QQ& x : row) r.push_back(to_string(x));
        sf.push_back(r);
    }
    j["skew_form"] = sf;
    Json mult = Json::object();
    for (const auto& [i, d] : lat.multipliers) mult[std::to_string(i + 1)] = to_string(d);
    j["multipliers"] = mult;
    j["scale"] = lat.scale;
    return j;
}

namespace {

Json vecz_json(const VecZ& v) {
    Json a = Json::array();
    for (long x : v) a.push_back(x);
    return a;
}

Json vecq_json(const VecQ& v) {
    Json a = Json::array();
    for (const QQ& x : v) a.push_back(to_string(x));
    return a;
}

Json support_json(const WallSupport& s) {
    Json j;
    j["normal"] = vecz_json(s.normal);
    j["offset"] = to_string(s.offset);
    Json cuts = Json::array();
    for (const LinCond& c : s.cuts) {
        Json cc;
        cc["a"] = vecq_json(c.a);
        cc["b"] = to_string(c.b);
        cuts.push_back(cc);
    }
    j["constraints"] = cuts;
    return j;
}

}  // namespace

Json diagram_to_json(const ScatteringDiagram& d) {
    Json j;
    j["order"] = d.order;
    j["kind"] = d.kind == DiagramKind::standard ? "standard" : "perturbed-nilpotent";
    j["lattice"] = lattice_to_json(d.lat);
    Json walls = Json::array();
    if (d.kind == DiagramKind::standard) {
        for (const Wall& w : d.walls) {
            Json wj;
            wj["support"] = support_json(w.support);
            wj["exponent_dir"] = vecz_json(w.exp_dir);
            Json lf = Json::object();
            for (const auto& [lev, c] : w.logfn) lf[std::to_string(lev)] = c.to_string();
            wj["logfn"] = lf;
            wj["incoming"] = wall_incoming(d.lat, w.support, w.exp_dir);
            walls.push_back(std::move(wj));
        }
    } else {
        for (const NilpotentWall& w : d.nwalls) {
            Json wj;
            wj["support"] = support_json(w.support);
            wj["exponent"] = vecz_json(w.exponent);
            wj["coeff"] = w.coeff.to_string();
            Json idx = Json::array();
            for (int b = 0; b < 64; ++b)
                if (w.index_mask & (uint64_t(1) << b)) idx.push_back(b);
            wj["index_set"] = idx;
            if (w.parent1 >= 0) wj["parents"] = Json::array({w.parent1, w.parent2});
            walls.push_back(std::move(wj));
        }
    }
    j["walls"] = walls;
    return j;
}

Json series_to_json(const GradedLattice& lat, const Series& s) {
    Json j;
    j["base"] = vecz_json(s.base);
    j["order"] = s.order;
    Json terms = Json::array();
    for (const auto& [k, c] : s.terms) {
        Json t;
        t["exp"] = vecz_json(k.e);
        if (k.u) t["u_mask"] = k.u;
        t["coeff"] = c.to_string();
        terms.push_back(std::move(t));
    }
    j["terms"] = terms;
    return j;
}

Json theta_map_to_json(const std::map<VecZ, QQ>& m) {
    Json terms = Json::array();
    for (const auto& [e, c] : m) {
        Json t;
        t["exp"] = vecz_json(e);
        t["coeff"] = to_string(c);
        terms.push_back(std::move(t));
    }
    return terms;
}

Json qmap_to_json(const GradedLattice& lat, const std::map<VecZ, QRational>& m) {
    Json terms = Json::array();
    for (const auto& [e, c] : m) {
        Json t;
        t["exp"] = vecz_json(e);
        t["coeff"] = c.to_string();
        terms.push_back(std::move(t));
    }
    return terms;
}

Json tree_to_json(const TropicalTree& t) {
    Json j;
    Json vs = Json::array();
    for (const VecQ& v : t.vertices) vs.push_back(vecq_json(v));
    j["vertices"] = vs;
    Json es = Json::array();
    for (const TropEdge& e : t.edges) {
        Json ej;
        ej["from"] = e.from;
        ej["to"] = e.to;
        ej["lift"] = vecz_json(e.lift);
        ej["weight"] = e.weight;
        if (e.mark_slot >= 0) ej["mark"] = "E_" + std::to_string(e.mark_slot + 1) + "," +
                                           std::to_string(e.mark_j + 1);
        if (e.mark_end >= 0) ej["mark"] = "F_" + std::to_string(e.mark_end + 1);
        es.push_back(std::move(ej));
    }
    j["edges"] = es;
    return j;
}

Json frobenius_report_to_json(const FrobeniusReport& rep) {
    Json j;
    j["pass"] = rep.pass;
    if (rep.prime) j["prime"] = rep.prime;
    if (rep.root_order) j["root_order"] = rep.root_order;
    if (rep.cyclo_modulus) j["cyclotomic_modulus"] = rep.cyclo_modulus;
    j["order"] = rep.order;
    Json table = Json::array();
    for (const FrobeniusEntry& e : rep.table) {
        Json ej;
        ej["exp"] = vecz_json(e.exponent);
        ej["lhs"] = e.lhs;
        ej["rhs"] = e.rhs;
        ej["match"] = e.match;
        table.push_back(std::move(ej));
    }
    j["table"] = table;
    return j;
}

Json consistency_report_to_json(const GradedLattice& lat, const ConsistencyReport& rep) {
    Json j;
    j["pass"] = rep.pass;
    Json issues = Json::array();
    for (const ConsistencyIssue& i : rep.issues) {
        Json ij;
        ij["joint"] = vecq_json(i.joint_point);
        ij["residual"] = series_to_json(lat, i.residual_log);
        issues.push_back(std::move(ij));
    }
    j["issues"] = issues;
    return j;
}

VecZ parse_vecz(const std::string& s, int rank) {
    std::vector<std::string> parts = split(s, ',');
    if (static_cast<int>(parts.size()) != rank)
        throw input_error("expected " + std::to_string(rank) + " integer coordinates: " + s);
    VecZ out(parts.size());
    for (size_t i = 0; i < parts.size(); ++i) {
        try {
            out[i] = std::stol(parts[i]);
        } catch (const std::exception&) {
            throw input_error("bad integer coordinate: " + parts[i]);
        }
    }
    return out;
}

VecQ parse_vecq(const std::string& s, int rank) {
    std::vector<std::string> parts = split(s, ',');
    if (static_cast<int>(parts.size()) != rank)
        throw input_error("expected " + std::to_string(rank) + " rational coordinates: " + s);
    VecQ out(parts.size());
    for (size_t i = 0; i < parts.size(); ++i) out[i] = parse_rational(parts[i]);
    return out;
}

std::vector<VecZ> parse_vecz_list(const std::string& s, int rank) {
    std::vector<VecZ> out;
    if (s.empty()) return out;
    for (const std::string& part : split(s, ';')) out.push_back(parse_vecz(part, rank));
    return out;
}

}  // namespace qscat
