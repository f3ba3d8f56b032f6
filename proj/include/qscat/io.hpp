#pragma once

#include <json.hpp>

#include "qscat/cluster.hpp"
#include "qscat/frobenius.hpp"
#include "qscat/tropical.hpp"

namespace qscat {

using Json = nlohmann::ordered_json;

/// Seed / lattice schema: {"rank": r, "frozen": [1-based indices],
/// "skew_form": [["p/q", ...], ...], "multipliers": {"i": "p/q"}}.
Seed seed_from_json(const Json& j);
Json seed_to_json(const Seed& s);
Seed load_seed(const std::string& path);

GradedLattice lattice_from_json(const Json& j);
Json lattice_to_json(const GradedLattice& lat);

Json diagram_to_json(const ScatteringDiagram& d);
Json series_to_json(const GradedLattice& lat, const Series& s);
Json theta_map_to_json(const std::map<VecZ, QQ>& m);
Json qmap_to_json(const GradedLattice& lat, const std::map<VecZ, QRational>& m);
Json tree_to_json(const TropicalTree& t);
Json frobenius_report_to_json(const FrobeniusReport& rep);
Json consistency_report_to_json(const GradedLattice& lat, const ConsistencyReport& rep);

VecZ parse_vecz(const std::string& s, int rank);      // "1,0,-2"
VecQ parse_vecq(const std::string& s, int rank);      // "1/2,-3,0"
std::vector<VecZ> parse_vecz_list(const std::string& s, int rank);  // ";"-separated

}  // namespace qscat
