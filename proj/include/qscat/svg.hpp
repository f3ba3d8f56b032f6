#pragma once

#include <string>

#include "qscat/tropical.hpp"

namespace qscat {

/// Rank-2 plotting conveniences (write-only output).
void write_diagram_svg(const ScatteringDiagram& d, const std::string& path, double span = 8.0);
void write_trees_svg(const GradedLattice& lat, const std::vector<TropicalTree>& trees,
                     const std::string& path, double span = 12.0);

}  // namespace qscat
