#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "poly.hpp"

namespace singscope {

class series_error : public poly_error {
  public:
    explicit series_error(const std::string& what) : poly_error(what) {}
};

/// Validity sentinel for series whose tail is identically zero (exact
/// polynomials). Chosen so that sums of validities never overflow int.
inline constexpr int kExactOrder = 1 << 24;

/// Polynomial data plus a guaranteed-valid total order: every stored term has
/// total degree <= valid_order, and nothing is known about higher terms.
/// Requesting a coefficient beyond valid_order is an error, never a silent
/// zero. Which pair of variables the two slots denote is contextual
/// ((x1,x2), (x1,s2), (z1,s2), ...).
class TruncatedSeries {
  public:
    TruncatedSeries() : valid_(kExactOrder) {}

    /// Wraps an exact polynomial (tail identically zero).
    explicit TruncatedSeries(LatticePolynomial p) : poly_(std::move(p)), valid_(kExactOrder) {}

    TruncatedSeries(LatticePolynomial p, int valid_order) : poly_(p.truncated(valid_order)), valid_(valid_order) {
        if (valid_order < 0) throw series_error("negative validity order");
    }

    static TruncatedSeries var1(int valid = kExactOrder) { return TruncatedSeries(LatticePolynomial::var1(), valid); }
    static TruncatedSeries var2(int valid = kExactOrder) { return TruncatedSeries(LatticePolynomial::var2(), valid); }
    static TruncatedSeries constant(const Rational& c) { return TruncatedSeries(LatticePolynomial::constant(c)); }

    const LatticePolynomial& poly() const { return poly_; }
    int valid_order() const { return valid_; }
    bool is_exact() const { return valid_ >= kExactOrder; }
    bool is_zero() const { return poly_.is_zero(); }

    /// True when the series involves only the given variable slot (1 or 2).
    bool depends_only_on(int var) const {
        for (const auto& [m, c] : poly_.terms())
            if ((var == 2 && m.e1 != 0) || (var == 1 && m.e2 != 0)) return false;
        return true;
    }

    /// Certified coefficient access.
    Rational coeff(int e1, int e2) const {
        if (e1 + e2 > valid_) throw series_error("coefficient of degree " + std::to_string(e1 + e2) + " requested beyond certified order " + std::to_string(valid_));
        return poly_.coeff(e1, e2);
    }

    /// Lower bound for the vanishing order (tail included).
    int order_lower_bound() const {
        int tail = is_exact() ? kExactOrder : valid_ + 1;
        return poly_.is_zero() ? tail : std::min(poly_.order(tail), tail);
    }

    /// Exact vanishing order; requires it to be certified.
    int vanishing_order() const {
        int lb = order_lower_bound();
        if (poly_.is_zero() && !is_exact()) throw series_error("vanishing order not certified: series is zero through order " + std::to_string(valid_));
        return lb;
    }

    TruncatedSeries capped(int order) const {
        if (order >= valid_) return *this;
        return TruncatedSeries(poly_, order);
    }

    TruncatedSeries operator-() const {
        TruncatedSeries r = *this;
        r.poly_ = -r.poly_;
        return r;
    }

    friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
        int v = std::min(a.valid_, b.valid_);
        return TruncatedSeries((a.poly_ + b.poly_).truncated(v), v);
    }
    friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return a + (-b); }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        if ((a.is_exact() && a.is_zero()) || (b.is_exact() && b.is_zero()))
            return TruncatedSeries(LatticePolynomial());
        int v = std::min(a.valid_ + b.order_lower_bound(), b.valid_ + a.order_lower_bound());
        v = std::min(v, kExactOrder);
        return TruncatedSeries((a.poly_ * b.poly_).truncated(v), v);
    }

    friend TruncatedSeries operator*(const Rational& c, const TruncatedSeries& a) {
        return TruncatedSeries(c * a.poly_, a.valid_);
    }

    TruncatedSeries pow(int k, int cap = kExactOrder) const {
        if (k < 0) throw series_error("negative power");
        TruncatedSeries acc = constant(1), b = *this;
        while (k > 0) {
            if (k & 1) acc = (acc * b).capped(cap);
            k >>= 1;
            if (k > 0) b = (b * b).capped(cap);
        }
        return acc;
    }

    TruncatedSeries derivative(int var) const {
        int v = is_exact() ? kExactOrder : valid_ - 1;
        if (v < 0) throw series_error("derivative exhausts certified order");
        return TruncatedSeries(poly_.derivative(var).truncated(v), v);
    }

    bool operator==(const TruncatedSeries& o) const { return poly_ == o.poly_ && valid_ == o.valid_; }

  private:
    LatticePolynomial poly_;
    int valid_;
};

/// Evaluates an exact polynomial at a pair of series arguments. The workhorse
/// behind shears, implicit solutions and the Legendre substitution.
inline TruncatedSeries subst(const LatticePolynomial& p, const TruncatedSeries& s1, const TruncatedSeries& s2,
                             int cap = kExactOrder) {
    int d1 = std::max(p.degree1(), 0), d2 = std::max(p.degree2(), 0);
    std::vector<TruncatedSeries> pow1(d1 + 1, TruncatedSeries::constant(1));
    std::vector<TruncatedSeries> pow2(d2 + 1, TruncatedSeries::constant(1));
    for (int i = 1; i <= d1; ++i) pow1[i] = (pow1[i - 1] * s1).capped(cap);
    for (int j = 1; j <= d2; ++j) pow2[j] = (pow2[j - 1] * s2).capped(cap);
    TruncatedSeries acc{LatticePolynomial()};
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        TruncatedSeries t = (c * ((pow1[m.e1] * pow2[m.e2]).capped(cap)));
        acc = first ? t : acc + t;
        first = false;
    }
    if (first) return TruncatedSeries(LatticePolynomial());
    return acc.capped(cap);
}

/// p(y1 + a(y2), y2): the non-linear shear substitution. a must be a series in
/// the second variable with a(0) = 0.
inline TruncatedSeries shear_substitute(const TruncatedSeries& p, const TruncatedSeries& a, int cap = kExactOrder) {
    if (!a.depends_only_on(2)) throw series_error("shear: alpha must depend on the second variable only");
    if (!a.is_zero() && a.poly().coeff(0, 0) != 0) throw series_error("shear: alpha(0) != 0");
    int work = std::min(cap, std::min(p.valid_order(), a.is_zero() ? kExactOrder : a.valid_order()));
    TruncatedSeries x1 = TruncatedSeries::var1();
    TruncatedSeries x2 = TruncatedSeries::var2();
    TruncatedSeries r = subst(p.poly(), x1 + a, x2, work);
    r = r.capped(std::min(r.valid_order(), p.valid_order()));
    if (r.valid_order() < 1) throw series_error("shear: order underflow");
    return r;
}

inline TruncatedSeries shear_substitute(const LatticePolynomial& p, const TruncatedSeries& a, int cap = kExactOrder) {
    return shear_substitute(TruncatedSeries(p), a, cap);
}

/// Multiplicative inverse of a series with nonzero constant term, certified to
/// `order` (Newton iteration, quadratic convergence).
inline TruncatedSeries reciprocal(const TruncatedSeries& d, int order) {
    Rational d0 = d.poly().coeff(0, 0);
    if (d0 == 0) throw series_error("reciprocal: zero constant term");
    if (d.valid_order() < order) throw series_error("reciprocal: order exceeds input validity");
    TruncatedSeries r = TruncatedSeries::constant(1 / d0);
    TruncatedSeries two = TruncatedSeries::constant(2);
    for (int k = 1; k < order + 1; k *= 2) {
        r = (r * (two - (d.capped(order) * r).capped(order))).capped(order);
    }
    return TruncatedSeries(r.poly(), order);
}

/// Unique series solution u(v), u(0) = 0, of F(u(v), v) = O(v^{order+1}),
/// where F is a series in (u, v) with F(0,0) = 0 and d_u F(0,0) != 0.
/// The residual is checked internally before returning.
inline TruncatedSeries solve_implicit(const TruncatedSeries& F, int order) {
    if (F.poly().coeff(0, 0) != 0) throw series_error("solve_implicit: F(0,0) != 0");
    const LatticePolynomial& f = F.poly();
    LatticePolynomial fu = f.derivative(1);
    if (fu.coeff(0, 0) == 0) throw series_error("solve_implicit: d_u F(0,0) = 0");
    if (F.valid_order() < order) throw series_error("solve_implicit: order exceeds input validity");
    TruncatedSeries u(LatticePolynomial(), order);
    TruncatedSeries v = TruncatedSeries::var2(order);
    for (int k = 1; k < order + 1; k *= 2) {
        TruncatedSeries num = subst(f, u, v, order);
        TruncatedSeries den = subst(fu, u, v, order);
        u = (u - (num * reciprocal(den, order)).capped(order)).capped(order);
    }
    u = TruncatedSeries(u.poly(), order);
    TruncatedSeries residual = subst(f, u, v, order);
    for (const auto& [m, c] : residual.poly().terms())
        if (m.total() <= order) throw series_error("solve_implicit: residual check failed");
    return u;
}

/// Exact division by x2^k (throws when not divisible).
inline TruncatedSeries divide_var2_power(const TruncatedSeries& s, int k) {
    LatticePolynomial q;
    for (const auto& [m, c] : s.poly().terms()) {
        if (m.e2 < k) throw series_error("division by x2^" + std::to_string(k) + ": not divisible");
        q.set({m.e1, m.e2 - k}, c);
    }
    int v = s.is_exact() ? kExactOrder : s.valid_order() - k;
    return TruncatedSeries(q, v);
}

/// Exact division by x1^k (throws when not divisible).
inline TruncatedSeries divide_var1_power(const TruncatedSeries& s, int k) {
    LatticePolynomial q;
    for (const auto& [m, c] : s.poly().terms()) {
        if (m.e1 < k) throw series_error("division by x1^" + std::to_string(k) + ": not divisible");
        q.set({m.e1 - k, m.e2}, c);
    }
    int v = s.is_exact() ? kExactOrder : s.valid_order() - k;
    return TruncatedSeries(q, v);
}

}  // namespace singscope
