#pragma once

#include <gmpxx.h>

#include <numeric>
#include <string>
#include <vector>

#include "qscat/errors.hpp"

namespace qscat {

using QQ = mpq_class;
using ZZ = mpz_class;

using VecZ = std::vector<long>;  // lattice vectors in basis coordinates
using VecQ = std::vector<QQ>;    // rational vectors / covectors / points

inline QQ qq(long num, long den = 1) {
    QQ x(num, den);
    x.canonicalize();
    return x;
}

// "p/q" or "p"; exact, no floating point anywhere.
QQ parse_rational(const std::string& s);
std::string to_string(const QQ& x);

inline bool is_integer(const QQ& x) { return x.get_den() == 1; }

// x = a/b reduced; returns a if b==1, throws otherwise.
inline ZZ integer_value(const QQ& x) {
    if (!is_integer(x)) throw scale_error("expected integer, got " + to_string(x));
    return x.get_num();
}

inline long long_value(const QQ& x) {
    ZZ z = integer_value(x);
    if (!z.fits_slong_p()) throw input_error("integer out of range");
    return z.get_si();
}

long gcd_long(long a, long b);

// Dot product of equal-length vectors.
QQ dot(const VecQ& a, const VecQ& b);
QQ dot(const VecZ& a, const VecQ& b);
long dot(const VecZ& a, const VecZ& b);

VecZ add(const VecZ& a, const VecZ& b);
VecZ sub(const VecZ& a, const VecZ& b);
VecZ scale(const VecZ& a, long k);
VecQ add(const VecQ& a, const VecQ& b);
VecQ sub(const VecQ& a, const VecQ& b);
VecQ scale(const VecQ& a, const QQ& k);
bool is_zero(const VecZ& v);
bool is_zero(const VecQ& v);

std::string to_string(const VecZ& v);
std::string to_string(const VecQ& v);

}  // namespace qscat
