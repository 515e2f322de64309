#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace singscope {

/// Exact rational scalar. All discrete invariants (Newton data, exponents,
/// classification output) are computed in this type; floating point never
/// enters those code paths.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline long to_long(const Rational& q) {
    if (!is_integer(q)) throw std::domain_error("rational: not an integer: " + q.get_str());
    if (!q.get_num().fits_slong_p()) throw std::domain_error("rational: integer overflow");
    return q.get_num().get_si();
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Canonical "p/q" rendering ("p" when q == 1), the wire format used in reports.
inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Parses "p" or "p/q" with optional sign. Throws on malformed input.
inline Rational parse_rational(const std::string& text) {
    Rational q;
    if (q.set_str(text, 10) != 0) throw std::invalid_argument("rational: cannot parse '" + text + "'");
    if (q.get_den() == 0) throw std::invalid_argument("rational: zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
}

inline Rational pow(const Rational& base, long exp) {
    if (exp < 0) {
        if (base == 0) throw std::domain_error("rational: 0 to negative power");
        Rational inv = 1 / base;
        return pow(inv, -exp);
    }
    Rational acc = 1, b = base;
    while (exp > 0) {
        if (exp & 1) acc *= b;
        b *= b;
        exp >>= 1;
    }
    return acc;
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace singscope
