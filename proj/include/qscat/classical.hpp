#pragma once

#include "qscat/broken.hpp"

namespace qscat {

/// Classical engine: coefficients in Q, wall crossings by the multiplicative
/// rule z^v -> z^v f^{W(v,n')} with f = exp of the classical log levels.
/// Broken-line geometry is shared with the quantum engine; the coefficient
/// replay is independent.
struct ClassicalDiagram {
    const ScatteringDiagram* diag = nullptr;
    // per standard wall: classical log levels l_w (regular at q = 1)
    std::vector<std::map<long, QQ>> levels;
    // per nilpotent wall: classical coefficient
    std::vector<QQ> ncoeff;
};

ClassicalDiagram classical_limit_diagram(const ScatteringDiagram& diag);

/// Coefficients of exp(c * sum_w w l_w x^w) up to x^kmax: the classical
/// crossing series for pairing value c = W(v, n').
std::vector<QQ> classical_crossing_coefficients(const ClassicalDiagram& cd, size_t wall,
                                                const QQ& form_v_dir, long kmax);

QQ classical_line_coefficient(const ClassicalDiagram& cd, const BrokenLine& line);

/// Classical theta: exponent -> rational coefficient.
std::map<VecZ, QQ> theta_classical(const ClassicalDiagram& cd, const VecZ& p, const VecQ& Q,
                                   long order);

/// Commutative product of classical thetas.
std::map<VecZ, QQ> theta_product_classical(const ClassicalDiagram& cd,
                                           const std::vector<VecZ>& ps, const VecQ& Q, long order);

}  // namespace qscat
