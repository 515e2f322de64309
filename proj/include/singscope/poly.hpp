#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace singscope {

/// Exponent pair of a bivariate monomial x1^e1 * x2^e2.
struct Monomial {
    int e1 = 0;
    int e2 = 0;

    int total() const { return e1 + e2; }
    Monomial operator*(const Monomial& o) const { return {e1 + o.e1, e2 + o.e2}; }
    bool operator==(const Monomial& o) const { return e1 == o.e1 && e2 == o.e2; }
};

/// Graded lexicographic order (total degree first, then e1). Canonical term
/// order for storage, printing and hashing.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        if (a.total() != b.total()) return a.total() < b.total();
        if (a.e1 != b.e1) return a.e1 < b.e1;
        return a.e2 < b.e2;
    }
};

class poly_error : public std::runtime_error {
  public:
    explicit poly_error(const std::string& what) : std::runtime_error("poly-core: " + what) {}
};

/// Sparse bivariate polynomial with exact rational coefficients.
/// Invariants: stored coefficients are nonzero, exponents non-negative.
/// Arithmetic is exact; no rounding ever occurs on this type.
class LatticePolynomial {
  public:
    using TermMap = std::map<Monomial, Rational, GrlexLess>;

    LatticePolynomial() = default;

    static LatticePolynomial constant(const Rational& c) {
        LatticePolynomial p;
        p.set({0, 0}, c);
        return p;
    }
    static LatticePolynomial term(const Rational& c, int e1, int e2) {
        if (e1 < 0 || e2 < 0) throw poly_error("negative exponent");
        LatticePolynomial p;
        p.set({e1, e2}, c);
        return p;
    }
    static LatticePolynomial var1() { return term(1, 1, 0); }
    static LatticePolynomial var2() { return term(1, 0, 1); }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    /// Coefficient of x1^e1 x2^e2 (zero when absent; exact, so this is safe).
    Rational coeff(int e1, int e2) const {
        auto it = terms_.find({e1, e2});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void set(const Monomial& m, const Rational& c) {
        if (m.e1 < 0 || m.e2 < 0) throw poly_error("negative exponent");
        if (c == 0)
            terms_.erase(m);
        else
            terms_[m] = c;
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    /// Total degree; -1 for the zero polynomial.
    int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.total(); }

    /// Minimal total degree among terms (the vanishing order); for the zero
    /// polynomial returns fallback.
    int order(int fallback) const {
        if (terms_.empty()) return fallback;
        int best = terms_.begin()->first.total();
        for (const auto& [m, c] : terms_) best = std::min(best, m.total());
        return best;
    }

    int degree1() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, m.e1);
        return d;
    }
    int degree2() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, m.e2);
        return d;
    }

    LatticePolynomial operator-() const {
        LatticePolynomial r = *this;
        for (auto& [m, c] : r.terms_) c = -c;
        return r;
    }

    LatticePolynomial& operator+=(const LatticePolynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    LatticePolynomial& operator-=(const LatticePolynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend LatticePolynomial operator+(LatticePolynomial a, const LatticePolynomial& b) { return a += b; }
    friend LatticePolynomial operator-(LatticePolynomial a, const LatticePolynomial& b) { return a -= b; }

    friend LatticePolynomial operator*(const LatticePolynomial& a, const LatticePolynomial& b) {
        LatticePolynomial r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
        return r;
    }
    LatticePolynomial& operator*=(const LatticePolynomial& o) { return *this = *this * o; }

    friend LatticePolynomial operator*(const Rational& c, const LatticePolynomial& p) {
        LatticePolynomial r;
        if (c == 0) return r;
        r.terms_ = p.terms_;
        for (auto& [m, v] : r.terms_) v *= c;
        return r;
    }

    bool operator==(const LatticePolynomial& o) const { return terms_ == o.terms_; }

    LatticePolynomial pow(int k) const {
        if (k < 0) throw poly_error("negative power");
        LatticePolynomial acc = constant(1), b = *this;
        while (k > 0) {
            if (k & 1) acc *= b;
            b *= b;
            k >>= 1;
        }
        return acc;
    }

    /// Exact partial derivative; var is 1 or 2.
    LatticePolynomial derivative(int var) const {
        LatticePolynomial r;
        for (const auto& [m, c] : terms_) {
            if (var == 1 && m.e1 > 0) r.add_term({m.e1 - 1, m.e2}, c * m.e1);
            if (var == 2 && m.e2 > 0) r.add_term({m.e1, m.e2 - 1}, c * m.e2);
        }
        return r;
    }

    template <typename T>
    T eval(const T& x1, const T& x2) const {
        T acc = T(0);
        for (const auto& [m, c] : terms_) {
            T t = T(to_double(c));
            for (int i = 0; i < m.e1; ++i) t = t * x1;
            for (int i = 0; i < m.e2; ++i) t = t * x2;
            acc = acc + t;
        }
        return acc;
    }

    Rational eval_exact(const Rational& x1, const Rational& x2) const {
        Rational acc = 0;
        for (const auto& [m, c] : terms_) acc += c * singscope::pow(x1, m.e1) * singscope::pow(x2, m.e2);
        return acc;
    }

    /// Keeps only terms with total degree <= bound.
    LatticePolynomial truncated(int bound) const {
        LatticePolynomial r;
        for (const auto& [m, c] : terms_)
            if (m.total() <= bound) r.set(m, c);
        return r;
    }

    /// Terms depending on x2 only (e1 == 0).
    LatticePolynomial slice_var2() const {
        LatticePolynomial r;
        for (const auto& [m, c] : terms_)
            if (m.e1 == 0) r.set(m, c);
        return r;
    }

    /// Swaps the roles of the two variables.
    LatticePolynomial swapped() const {
        LatticePolynomial r;
        for (const auto& [m, c] : terms_) r.set({m.e2, m.e1}, c);
        return r;
    }

  private:
    TermMap terms_;
};

/// The Taylor support: exponent pairs carrying a nonzero coefficient.
inline std::vector<Monomial> taylor_support(const LatticePolynomial& p) {
    std::vector<Monomial> pts;
    pts.reserve(p.term_count());
    for (const auto& [m, c] : p.terms()) pts.push_back(m);
    return pts;
}

}  // namespace singscope
