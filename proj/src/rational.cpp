#include "qscat/rational.hpp"

#include <sstream>

namespace qscat {

QQ parse_rational(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw input_error("empty rational literal");
    for (size_t i = 0; i < t.size(); ++i) {
        char c = t[i];
        if (!(isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '/'))
            throw input_error("bad rational literal: " + s);
    }
    try {
        QQ x(t);
        x.canonicalize();
        return x;
    } catch (const std::invalid_argument&) {
        throw input_error("bad rational literal: " + s);
    }
}

std::string to_string(const QQ& x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

long gcd_long(long a, long b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

QQ dot(const VecQ& a, const VecQ& b) {
    QQ s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

QQ dot(const VecZ& a, const VecQ& b) {
    QQ s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += QQ(a[i]) * b[i];
    return s;
}

long dot(const VecZ& a, const VecZ& b) {
    long s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

VecZ add(const VecZ& a, const VecZ& b) {
    VecZ r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

VecZ sub(const VecZ& a, const VecZ& b) {
    VecZ r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

VecZ scale(const VecZ& a, long k) {
    VecZ r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * k;
    return r;
}

VecQ add(const VecQ& a, const VecQ& b) {
    VecQ r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

VecQ sub(const VecQ& a, const VecQ& b) {
    VecQ r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

VecQ scale(const VecQ& a, const QQ& k) {
    VecQ r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * k;
    return r;
}

bool is_zero(const VecZ& v) {
    for (long x : v)
        if (x) return false;
    return true;
}

bool is_zero(const VecQ& v) {
    for (const QQ& x : v)
        if (x != 0) return false;
    return true;
}

std::string to_string(const VecZ& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s + ")";
}

std::string to_string(const VecQ& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += to_string(v[i]);
    }
    return s + ")";
}

}  // namespace qscat
