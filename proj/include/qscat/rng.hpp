#pragma once

#include <cstdint>
#include <random>

#include "qscat/rational.hpp"

namespace qscat {

/// Deterministic source of generic rational data.  All offsets and base
/// points are drawn here so a run is reproducible from its seed.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t raw() { return eng_(); }

    // rational with large denominator, magnitude bounded by span
    QQ generic_rational(long span = 8) {
        std::uniform_int_distribution<long> den(100003, 999983);
        long d = den(eng_);
        std::uniform_int_distribution<long> num(-span * d, span * d);
        QQ r(num(eng_), d);
        r.canonicalize();
        return r;
    }

    VecQ generic_point(size_t dim, long span = 8) {
        VecQ v(dim);
        for (QQ& x : v) x = generic_rational(span);
        return v;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace qscat
