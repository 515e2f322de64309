#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace singscope {

/// Dense univariate polynomial over Q, coefficients by ascending degree.
/// Small degrees only; used for exact root-structure decisions (square-free
/// decomposition, Sturm chains, perfect-power tests). No floating point.
using UPoly = std::vector<Rational>;

inline void unormalize(UPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}
inline int udeg(const UPoly& p) { return static_cast<int>(p.size()) - 1; }
inline bool uis_zero(const UPoly& p) { return p.empty(); }

inline UPoly uadd(UPoly a, const UPoly& b) {
    if (a.size() < b.size()) a.resize(b.size(), Rational(0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    unormalize(a);
    return a;
}

inline UPoly uscale(UPoly a, const Rational& c) {
    if (c == 0) return {};
    for (auto& x : a) x *= c;
    return a;
}

inline UPoly usub(UPoly a, const UPoly& b) { return uadd(std::move(a), uscale(b, Rational(-1))); }

inline UPoly umul(const UPoly& a, const UPoly& b) {
    if (uis_zero(a) || uis_zero(b)) return {};
    UPoly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    unormalize(r);
    return r;
}

inline UPoly uderiv(const UPoly& p) {
    UPoly r;
    for (std::size_t i = 1; i < p.size(); ++i) r.push_back(p[i] * static_cast<long>(i));
    unormalize(r);
    return r;
}

inline Rational ueval(const UPoly& p, const Rational& x) {
    Rational acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

/// Field division with remainder: a = q*b + r, deg r < deg b.
inline std::pair<UPoly, UPoly> udivmod(UPoly a, const UPoly& b) {
    if (uis_zero(b)) throw std::domain_error("upoly: division by zero");
    UPoly q(a.size(), Rational(0));
    while (!uis_zero(a) && udeg(a) >= udeg(b)) {
        int shift = udeg(a) - udeg(b);
        Rational f = a.back() / b.back();
        q[shift] += f;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        unormalize(a);
    }
    unormalize(q);
    return {q, a};
}

inline UPoly umonic(UPoly p) {
    if (uis_zero(p)) return p;
    Rational lc = p.back();
    for (auto& c : p) c /= lc;
    return p;
}

namespace detail {

/// Denominator-cleared, integer-content-stripped copy.
inline std::vector<mpz_class> primitive_z(const UPoly& p) {
    mpz_class l = 1;
    for (const auto& c : p) l = lcm(l, c.get_den());
    std::vector<mpz_class> z;
    z.reserve(p.size());
    for (const auto& c : p) z.push_back(mpz_class(c.get_num() * (l / c.get_den())));
    mpz_class g = 0;
    for (const auto& x : z) g = gcd(g, x);
    if (g != 0)
        for (auto& x : z) x /= g;
    return z;
}

}  // namespace detail

/// Primitive pseudo-remainder sequence over Z: plain rational Euclid grows
/// coefficient bits exponentially, which is fatal already around degree 40.
inline UPoly ugcd(UPoly a, UPoly b) {
    unormalize(a);
    unormalize(b);
    if (uis_zero(a)) return umonic(b);
    if (uis_zero(b)) return umonic(a);
    std::vector<mpz_class> A = detail::primitive_z(a), B = detail::primitive_z(b);
    if (A.size() < B.size()) std::swap(A, B);
    while (!B.empty()) {
        // pseudo-remainder of A by B
        std::vector<mpz_class> R = A;
        const mpz_class& lb = B.back();
        while (R.size() >= B.size()) {
            mpz_class la = R.back();
            std::size_t shift = R.size() - B.size();
            for (auto& x : R) x *= lb;
            for (std::size_t i = 0; i < B.size(); ++i) R[shift + i] -= la * B[i];
            while (!R.empty() && R.back() == 0) R.pop_back();
        }
        // primitive part
        mpz_class g = 0;
        for (const auto& x : R) g = gcd(g, x);
        if (g != 0)
            for (auto& x : R) x /= g;
        A = std::move(B);
        B = std::move(R);
    }
    UPoly out;
    out.reserve(A.size());
    for (const auto& x : A) out.push_back(Rational(x));
    return umonic(out);
}

/// Yun's square-free decomposition: p = lc * prod F_i^i, F_i square-free,
/// pairwise coprime. Returns (F_i, i) for the non-constant F_i only.
inline std::vector<std::pair<UPoly, int>> usquarefree(const UPoly& p) {
    std::vector<std::pair<UPoly, int>> out;
    if (udeg(p) < 1) return out;
    UPoly f = umonic(p);
    UPoly fp = uderiv(f);
    UPoly a = ugcd(f, fp);
    UPoly b = udivmod(f, a).first;
    UPoly c = udivmod(fp, a).first;
    UPoly d = usub(c, uderiv(b));
    int i = 1;
    while (udeg(b) > 0) {
        UPoly g = ugcd(b, d);
        if (udeg(g) > 0) out.emplace_back(umonic(g), i);
        b = udivmod(b, g).first;
        c = udivmod(d, g).first;
        d = usub(c, uderiv(b));
        ++i;
    }
    return out;
}

inline int usign_at(const UPoly& p, const Rational& x) {
    Rational v = ueval(p, x);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

inline int usign_at_pos_inf(const UPoly& p) { return uis_zero(p) ? 0 : (p.back() > 0 ? 1 : -1); }
inline int usign_at_neg_inf(const UPoly& p) {
    if (uis_zero(p)) return 0;
    int s = p.back() > 0 ? 1 : -1;
    return (udeg(p) % 2 == 0) ? s : -s;
}

namespace detail {

inline std::vector<UPoly> sturm_chain(const UPoly& p) {
    std::vector<UPoly> chain;
    UPoly a = p;
    unormalize(a);
    if (uis_zero(a)) return chain;
    chain.push_back(a);
    UPoly b = uderiv(a);
    while (!uis_zero(b)) {
        chain.push_back(b);
        UPoly r = udivmod(a, b).second;
        a = std::move(b);
        b = uscale(std::move(r), Rational(-1));
    }
    return chain;
}

template <typename SignFn>
int sign_changes(const std::vector<UPoly>& chain, SignFn sign) {
    int changes = 0, prev = 0;
    for (const auto& q : chain) {
        int s = sign(q);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

}  // namespace detail

/// Number of distinct real roots in the open interval (lo, hi); pass
/// unbounded = true for the whole real line.
inline int ucount_real_roots(const UPoly& p, const Rational& lo, const Rational& hi, bool unbounded = false) {
    UPoly sf = udeg(p) >= 1 ? udivmod(p, ugcd(p, uderiv(p))).first : p;
    auto chain = detail::sturm_chain(sf);
    if (chain.empty()) return 0;
    int at_lo = unbounded ? detail::sign_changes(chain, [](const UPoly& q) { return usign_at_neg_inf(q); })
                          : detail::sign_changes(chain, [&](const UPoly& q) { return usign_at(q, lo); });
    int at_hi = unbounded ? detail::sign_changes(chain, [](const UPoly& q) { return usign_at_pos_inf(q); })
                          : detail::sign_changes(chain, [&](const UPoly& q) { return usign_at(q, hi); });
    int n = at_lo - at_hi;
    if (!unbounded && usign_at(sf, hi) == 0) --n;  // (lo, hi) open: drop a root at hi
    return n;
}

inline int ucount_real_roots(const UPoly& p) { return ucount_real_roots(p, 0, 0, true); }

/// Distinct real roots in (0, inf) / (-inf, 0).
inline int ucount_positive_roots(const UPoly& p) {
    UPoly sf = udeg(p) >= 1 ? udivmod(p, ugcd(p, uderiv(p))).first : p;
    auto chain = detail::sturm_chain(sf);
    if (chain.empty()) return 0;
    int at0 = detail::sign_changes(chain, [](const UPoly& q) { return usign_at(q, 0); });
    int atinf = detail::sign_changes(chain, [](const UPoly& q) { return usign_at_pos_inf(q); });
    return at0 - atinf;
}
inline int ucount_negative_roots(const UPoly& p) {
    UPoly sf = udeg(p) >= 1 ? udivmod(p, ugcd(p, uderiv(p))).first : p;
    auto chain = detail::sturm_chain(sf);
    if (chain.empty()) return 0;
    int atminf = detail::sign_changes(chain, [](const UPoly& q) { return usign_at_neg_inf(q); });
    int at0 = detail::sign_changes(chain, [](const UPoly& q) { return usign_at(q, 0); });
    int n = atminf - at0;
    if (usign_at(sf, 0) == 0) --n;  // exclude a root at 0
    return n;
}

/// Exact test for p == lc * (t - c)^d with rational c != 0; the d-fold root
/// of a rational polynomial is itself rational, so c can be read off the
/// subleading coefficient and verified by expansion.
inline std::optional<Rational> uis_power_of_linear(const UPoly& p, int d) {
    if (udeg(p) != d || d < 1) return std::nullopt;
    Rational lc = p.back();
    Rational c = -p[d - 1] / (lc * d);
    if (c == 0) return std::nullopt;
    // verify: p == lc * (t - c)^d, binomial by binomial
    Rational binom = 1;
    for (int k = 0; k <= d; ++k) {
        // coefficient of t^{d-k}: lc * C(d,k) * (-c)^k
        Rational expect = lc * binom * pow(-c, k);
        if (p[d - k] != expect) return std::nullopt;
        binom = binom * (d - k) / (k + 1);
    }
    return c;
}

}  // namespace singscope
