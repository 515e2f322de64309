#pragma once

#include <complex>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "newton.hpp"
#include "roots.hpp"
#include "series.hpp"
#include "upoly.hpp"

namespace singscope {

class puiseux_error : public std::runtime_error {
  public:
    explicit puiseux_error(const std::string& what) : std::runtime_error("puiseux-resolve: " + what) {}
};

/// d2/dz1^2 phi1: the phase whose zero set drives the whole resolution.
inline TruncatedSeries phase_second_derivative(const TruncatedSeries& phi1) {
    return phi1.derivative(1).derivative(1);
}

// ---------------------------------------------------------------------------
// Numeric polynomials with fractional s-exponents
// ---------------------------------------------------------------------------

struct PhaseKey {
    int zdeg;
    Rational sexp;
    bool operator<(const PhaseKey& o) const {
        if (zdeg != o.zdeg) return zdeg < o.zdeg;
        return sexp < o.sexp;
    }
    bool operator==(const PhaseKey& o) const { return zdeg == o.zdeg && sexp == o.sexp; }
};

/// Real-coefficient polynomial in z with fractional powers of s: the shape of
/// the phases Phi^{[p]} appearing from Step 2 of the resolution onwards.
class PhasePolynomial {
  public:
    std::map<PhaseKey, double> terms;

    static PhasePolynomial from_series(const TruncatedSeries& s) {
        PhasePolynomial p;
        for (const auto& [m, c] : s.poly().terms()) p.terms[{m.e1, Rational(m.e2)}] = to_double(c);
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    double eval(double z, double s) const {
        double acc = 0;
        for (const auto& [k, c] : terms) acc += c * std::pow(z, k.zdeg) * std::pow(s, to_double(k.sexp));
        return acc;
    }

    std::vector<PointQ> support() const {
        std::vector<PointQ> pts;
        for (const auto& [k, c] : terms) pts.push_back({Rational(k.zdeg), k.sexp});
        return pts;
    }

    /// z -> z + c s^a, expanded binomially. Cancellations are detected against
    /// the accumulated absolute mass per monomial, so that an exact algebraic
    /// cancellation evaluated in floating point still produces a zero term.
    PhasePolynomial shifted(double c, const Rational& a, double rel_tol = 1e-9) const {
        std::map<PhaseKey, std::pair<double, double>> acc;  // sum, abs-sum
        for (const auto& [k, coeff] : terms) {
            double binom = 1.0;
            double cpow = 1.0;
            for (int i = k.zdeg; i >= 0; --i) {
                // contribution to z^i s^{sexp + (zdeg-i) a}: C(zdeg, i) c^{zdeg-i}
                double v = coeff * binom * cpow;
                PhaseKey key{i, k.sexp + Rational(k.zdeg - i) * a};
                auto& slot = acc[key];
                slot.first += v;
                slot.second += std::abs(v);
                binom = binom * i / (k.zdeg - i + 1);
                cpow *= c;
            }
        }
        PhasePolynomial out;
        for (const auto& [key, slot] : acc)
            if (std::abs(slot.first) > rel_tol * slot.second) out.terms[key] = slot.first;
        return out;
    }
};

// ---------------------------------------------------------------------------
// Exact square-free decomposition in z over Q[s]
// ---------------------------------------------------------------------------

namespace detail {

/// Polynomial in z with coefficients in Q[s].
using QsPoly = std::vector<UPoly>;

inline void qs_normalize(QsPoly& p) {
    while (!p.empty() && uis_zero(p.back())) p.pop_back();
}
inline int qs_deg(const QsPoly& p) { return static_cast<int>(p.size()) - 1; }

inline QsPoly qs_from_series(const LatticePolynomial& poly) {
    QsPoly p;
    for (const auto& [m, c] : poly.terms()) {
        if (static_cast<std::size_t>(m.e1) >= p.size()) p.resize(m.e1 + 1);
        UPoly& u = p[m.e1];
        if (static_cast<std::size_t>(m.e2) >= u.size()) u.resize(m.e2 + 1, Rational(0));
        u[m.e2] += c;
    }
    for (auto& u : p) unormalize(u);
    qs_normalize(p);
    return p;
}

inline LatticePolynomial qs_to_poly(const QsPoly& p) {
    LatticePolynomial out;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p[i].size(); ++j) out.add_term({static_cast<int>(i), static_cast<int>(j)}, p[i][j]);
    return out;
}

inline QsPoly qs_mul(const QsPoly& a, const QsPoly& b) {
    if (a.empty() || b.empty()) return {};
    QsPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = uadd(std::move(r[i + j]), umul(a[i], b[j]));
    qs_normalize(r);
    return r;
}

inline QsPoly qs_deriv_z(const QsPoly& p) {
    QsPoly r;
    for (std::size_t i = 1; i < p.size(); ++i) r.push_back(uscale(p[i], Rational(static_cast<long>(i))));
    qs_normalize(r);
    return r;
}

inline UPoly qs_content(const QsPoly& p) {
    UPoly g;
    for (const auto& u : p) g = ugcd(g, u);
    return g;
}

inline QsPoly qs_divide_content(const QsPoly& p, const UPoly& c) {
    QsPoly r;
    for (const auto& u : p) {
        auto [q, rem] = udivmod(u, c);
        if (!uis_zero(rem)) throw puiseux_error("content division failed");
        r.push_back(q);
    }
    qs_normalize(r);
    return r;
}

inline QsPoly qs_primitive(const QsPoly& p) {
    if (p.empty()) return p;
    return qs_divide_content(p, qs_content(p));
}

/// Pseudo-remainder of a by b in z (coefficients in Q[s]).
inline QsPoly qs_prem(QsPoly a, const QsPoly& b) {
    qs_normalize(a);
    if (b.empty()) throw puiseux_error("pseudo-division by zero");
    int db = qs_deg(b);
    const UPoly& lb = b.back();
    while (qs_deg(a) >= db && !a.empty()) {
        int shift = qs_deg(a) - db;
        UPoly la = a.back();
        // a := lb * a - la * z^shift * b
        QsPoly scaled(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) scaled[i] = umul(a[i], lb);
        for (int i = 0; i <= db; ++i) scaled[shift + i] = usub(std::move(scaled[shift + i]), umul(la, b[i]));
        a = std::move(scaled);
        qs_normalize(a);
    }
    return a;
}

inline QsPoly qs_gcd(QsPoly a, QsPoly b) {
    qs_normalize(a);
    qs_normalize(b);
    if (a.empty()) return qs_primitive(b);
    if (b.empty()) return qs_primitive(a);
    if (qs_deg(a) < qs_deg(b)) std::swap(a, b);
    a = qs_primitive(a);
    b = qs_primitive(b);
    while (true) {
        QsPoly r = qs_prem(a, b);
        if (r.empty()) break;
        a = std::move(b);
        b = qs_primitive(r);
    }
    // normalize: monic in the leading z-coefficient when it is constant
    return b;
}

inline QsPoly qs_exact_div(const QsPoly& a, const QsPoly& b) {
    // exact division in (Q[s])[z] via coefficient recursion against the
    // leading coefficient of b
    QsPoly rem = a;
    qs_normalize(rem);
    if (b.empty()) throw puiseux_error("division by zero");
    int db = qs_deg(b);
    QsPoly q(std::max<std::size_t>(1, a.size()));
    while (!rem.empty() && qs_deg(rem) >= db) {
        int shift = qs_deg(rem) - db;
        // leading coefficient of rem must be divisible by that of b
        auto [qc, rc] = udivmod(rem.back(), b.back());
        if (!uis_zero(rc)) throw puiseux_error("exact division failed");
        q[shift] = uadd(std::move(q[shift]), qc);
        for (int i = 0; i <= db; ++i) rem[shift + i] = usub(std::move(rem[shift + i]), umul(qc, b[i]));
        qs_normalize(rem);
    }
    if (!rem.empty()) throw puiseux_error("exact division left a remainder");
    qs_normalize(q);
    return q;
}

/// Square-free decomposition in z over Q[s] (Yun). Returns (factor, mult).
inline std::vector<std::pair<QsPoly, int>> qs_squarefree(const QsPoly& p) {
    std::vector<std::pair<QsPoly, int>> out;
    if (qs_deg(p) < 1) return out;
    QsPoly f = qs_primitive(p);
    QsPoly fp = qs_deriv_z(f);
    QsPoly a = qs_gcd(f, fp);
    if (qs_deg(a) < 1) {
        out.emplace_back(f, 1);
        return out;
    }
    QsPoly b = qs_exact_div(f, a);
    QsPoly c = qs_exact_div(fp, a);
    QsPoly d_poly;
    {
        QsPoly db = qs_deriv_z(b);
        d_poly = c;
        for (std::size_t i = 0; i < db.size(); ++i) {
            if (i >= d_poly.size()) d_poly.resize(i + 1);
            d_poly[i] = usub(std::move(d_poly[i]), db[i]);
        }
        qs_normalize(d_poly);
    }
    int i = 1;
    while (qs_deg(b) > 0) {
        QsPoly g = qs_gcd(b, d_poly);
        if (qs_deg(g) > 0) out.emplace_back(qs_primitive(g), i);
        b = qs_deg(g) > 0 ? qs_exact_div(b, g) : b;
        QsPoly cnew = qs_deg(g) > 0 ? qs_exact_div(d_poly, g) : d_poly;
        QsPoly db = qs_deriv_z(b);
        d_poly = cnew;
        for (std::size_t k = 0; k < db.size(); ++k) {
            if (k >= d_poly.size()) d_poly.resize(k + 1);
            d_poly[k] = usub(std::move(d_poly[k]), db[k]);
        }
        qs_normalize(d_poly);
        ++i;
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Puiseux series and root expansion
// ---------------------------------------------------------------------------

struct PuiseuxTerm {
    Rational exponent;
    std::complex<double> coeff;
};

/// Fractional-power expansion of a root z(s). Exponents are exact rationals;
/// coefficients are complex doubles obtained from exact edge polynomials.
struct PuiseuxSeries {
    std::vector<PuiseuxTerm> terms;
    long ramification = 1;
    bool exact_tail = false;  // the series terminates: the jet IS the root
    bool separated = true;    // false when the expansion depth could not split a cluster

    int depth() const { return static_cast<int>(terms.size()); }
    bool is_real(double tol = 1e-9) const {
        for (const auto& t : terms)
            if (std::abs(t.coeff.imag()) > tol * std::abs(t.coeff)) return false;
        return true;
    }
    std::complex<double> eval(double s) const {
        std::complex<double> acc = 0;
        for (const auto& t : terms) acc += t.coeff * std::pow(s, to_double(t.exponent));
        return acc;
    }
};

struct RootBranch {
    PuiseuxSeries series;
    int multiplicity = 1;
};

struct PuiseuxRootData {
    int nu1 = 0;       // trivial roots z^{nu1}
    int nu2 = 0;       // pure s-power factored out
    int degree_z = 0;
    int far_roots = 0;  // roots not tending to 0 with s (outside the local picture)
    std::vector<RootBranch> roots;
};

namespace detail {

using CKey = PhaseKey;
using CPoly = std::map<CKey, std::complex<double>>;

inline CPoly cpoly_from_qs(const QsPoly& p) {
    CPoly out;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p[i].size(); ++j)
            if (p[i][j] != 0) out[{static_cast<int>(i), Rational(static_cast<long>(j))}] = to_double(p[i][j]);
    return out;
}

inline double cpoly_scale(const CPoly& p) {
    double m = 0;
    for (const auto& [k, c] : p) m = std::max(m, std::abs(c));
    return m;
}

struct ExpandContext {
    int depth;
    std::vector<PuiseuxSeries> out;
};

/// Newton-polygon recursion: collect all branches z(s) -> 0 of G with leading
/// exponents strictly greater than a_min. `prefix` carries the jet found so
/// far with absolute exponents.
inline void expand_branches(CPoly G, const Rational& a_min, std::vector<PuiseuxTerm> prefix, long ram, int depth_left,
                            ExpandContext& ctx, int expected_count) {
    if (G.empty()) throw puiseux_error("expansion lost the polynomial");

    // exact-root detection: a z-content z^zval means w = 0 solves with that
    // multiplicity, i.e. the prefix is a complete root; peel the factor off.
    int zval = 1 << 20;
    for (const auto& [k, c] : G) zval = std::min(zval, k.zdeg);
    int emitted = 0;
    if (zval > 0) {
        for (int i = 0; i < zval; ++i) {
            PuiseuxSeries ps;
            ps.terms = prefix;
            ps.ramification = ram;
            ps.exact_tail = true;
            ps.separated = true;
            ctx.out.push_back(ps);
        }
        emitted = zval;
        CPoly peeled;
        for (const auto& [k, c] : G) peeled[{k.zdeg - zval, k.sexp}] = c;
        G = std::move(peeled);
        if (emitted == expected_count) return;
    }

    if (depth_left <= 0) {
        // depth exhausted: report the unseparated cluster at the prefix
        for (int i = emitted; i < expected_count; ++i) {
            PuiseuxSeries ps;
            ps.terms = prefix;
            ps.ramification = ram;
            ps.exact_tail = false;
            ps.separated = false;
            ctx.out.push_back(ps);
        }
        return;
    }

    // lower hull of the support; follow edges with slope > a_min
    NewtonPolyhedron np = newton_polyhedron([&] {
        std::vector<PointQ> pts;
        for (const auto& [k, c] : G) pts.push_back({Rational(k.zdeg), k.sexp});
        return pts;
    }());
    int found = emitted;
    for (const Edge& e : np.edges) {
        Rational a = e.kappa.k1 / e.kappa.k2;  // modulus of slope
        if (!(a > a_min)) continue;
        // edge polynomial in the leading coefficient c
        long bmin = to_long(e.left.b);
        long bmax = to_long(e.right.b);
        std::vector<std::complex<double>> ec(bmax - bmin + 1, 0.0);
        for (const auto& [k, c] : G)
            if (e.kappa.degree_of(PointQ{Rational(k.zdeg), k.sexp}) == 1) ec[k.zdeg - bmin] += c;
        while (ec.size() > 1 && std::abs(ec.back()) == 0) ec.pop_back();
        auto roots = all_roots(ec);
        // Group equal roots (they continue splitting at deeper exponents).
        // Durand-Kerner scatters an m-fold root by ~eps^{1/m}, so the grouping
        // band is wide; each group center is then re-sharpened by Newton on
        // the (m-1)-st derivative, where the root is simple.
        std::vector<std::pair<std::complex<double>, int>> groups;
        double rscale = 0;
        for (auto r : roots) rscale = std::max(rscale, std::abs(r));
        for (auto r : roots) {
            bool merged = false;
            for (auto& g : groups)
                if (std::abs(g.first - r) <= 1e-5 * std::max(1.0, rscale)) {
                    g.first = (g.first * double(g.second) + r) / double(g.second + 1);
                    g.second++;
                    merged = true;
                    break;
                }
            if (!merged) groups.emplace_back(r, 1);
        }
        for (auto& [c0, mu] : groups) {
            if (mu <= 1) continue;
            std::vector<std::complex<double>> f = ec;
            for (int d = 1; d < mu; ++d) {
                std::vector<std::complex<double>> df(f.size() - 1);
                for (std::size_t i = 1; i < f.size(); ++i) df[i - 1] = f[i] * double(i);
                f = std::move(df);
            }
            for (int it = 0; it < 30; ++it) {
                std::complex<double> val = 0, der = 0;
                for (std::size_t i = f.size(); i-- > 0;) {
                    der = der * c0 + val;
                    val = val * c0 + f[i];
                }
                if (std::abs(der) == 0) break;
                std::complex<double> delta = val / der;
                c0 -= delta;
                if (std::abs(delta) < 1e-16 * std::max(1.0, std::abs(c0))) break;
            }
        }
        for (std::size_t i = 0; i < groups.size(); ++i)
            for (std::size_t j = i + 1; j < groups.size(); ++j)
                if (std::abs(groups[i].first - groups[j].first) <= 1e-6 * std::max(1.0, rscale))
                    throw puiseux_error("edge roots closer than the separation tolerance");
        long newram = std::lcm(ram, static_cast<long>(a.get_den().get_si()));
        for (const auto& [c0, mu] : groups) {
            std::vector<PuiseuxTerm> next = prefix;
            next.push_back({a, c0});
            if (mu == 1 && depth_left == 1) {
                PuiseuxSeries ps;
                ps.terms = next;
                ps.ramification = newram;
                ctx.out.push_back(ps);
                ++found;
                continue;
            }
            // shift z -> c0 s^a + z and recurse on branches with slope > a
            CPoly shifted;
            std::map<CKey, double> mass;
            for (const auto& [k, coeff] : G) {
                std::complex<double> cpow = 1.0;
                double binom = 1.0;
                for (int i = k.zdeg; i >= 0; --i) {
                    std::complex<double> v = coeff * binom * cpow;
                    CKey key{i, k.sexp + Rational(k.zdeg - i) * a};
                    shifted[key] += v;
                    mass[key] += std::abs(v);
                    binom = binom * i / (k.zdeg - i + 1);
                    cpow *= c0;
                }
            }
            CPoly cleaned;
            for (const auto& [k, c] : shifted)
                if (std::abs(c) > 1e-9 * mass[k]) cleaned[k] = c;
            std::size_t before = ctx.out.size();
            expand_branches(cleaned, a, next, newram, depth_left - 1, ctx, mu);
            found += static_cast<int>(ctx.out.size() - before);
        }
    }
    if (found != expected_count)
        throw puiseux_error("branch accounting failed: expected " + std::to_string(expected_count) + ", found " +
                            std::to_string(found));
}

}  // namespace detail

/// Newton-Puiseux root expansion of psi(z, s) around s = 0 (roots z -> 0).
/// The trivial factor z^{nu1} and the pure s-power are peeled off first;
/// multiplicities come from the exact square-free decomposition of the
/// remaining part in z over Q[s], so that each expanded branch is a simple
/// root of its factor.
inline PuiseuxRootData puiseux_roots(const TruncatedSeries& psi, int depth) {
    if (psi.is_zero()) throw puiseux_error("cannot expand the zero phase");
    if (depth < 1) throw puiseux_error("depth must be positive");
    PuiseuxRootData out;
    LatticePolynomial p = psi.poly();
    int nu1 = p.degree1() + 1, nu2 = p.degree2() + 1;
    for (const auto& [m, c] : p.terms()) {
        nu1 = std::min(nu1, m.e1);
        nu2 = std::min(nu2, m.e2);
    }
    LatticePolynomial core;
    for (const auto& [m, c] : p.terms()) core.set({m.e1 - nu1, m.e2 - nu2}, c);
    out.nu1 = nu1;
    out.nu2 = nu2;
    out.degree_z = p.degree1();

    detail::QsPoly q = detail::qs_from_series(core);
    if (detail::qs_deg(q) < 1) return out;  // only trivial roots
    // branches that do not vanish with s (constant-in-s roots) are not part of
    // the local cluster picture; they would show as an edge of slope 0 and are
    // excluded by requiring a positive leading exponent below.
    auto factors = detail::qs_squarefree(q);
    for (const auto& [factor, mult] : factors) {
        detail::CPoly G = detail::cpoly_from_qs(factor);
        // branches with z -> 0 as s -> 0: the z-valuation of factor(z, 0)
        // (the factor is primitive in Q[s], so factor(z,0) != 0)
        int dz = detail::qs_deg(factor);
        int vanishing = dz;
        for (int i = 0; i <= dz; ++i)
            if (!factor[i].empty() && factor[i][0] != 0) {
                vanishing = i;
                break;
            }
        out.far_roots += (dz - vanishing) * mult;
        if (vanishing == 0) continue;
        detail::ExpandContext ctx{depth, {}};
        detail::expand_branches(G, Rational(0), {}, 1, depth, ctx, vanishing);
        for (auto& ps : ctx.out) {
            if (ps.terms.empty() && !ps.exact_tail) ps.separated = false;
            out.roots.push_back({ps, mult});
        }
    }
    // accounting: nu1 + local roots + roots staying away from z = 0 must
    // exhaust the z-degree
    int total = out.nu1 + out.far_roots;
    for (const auto& r : out.roots) total += r.multiplicity;
    if (total != out.degree_z)
        throw puiseux_error("root count mismatch: " + std::to_string(total) + " of " + std::to_string(out.degree_z));
    return out;
}

// ---------------------------------------------------------------------------
// Cluster tree
// ---------------------------------------------------------------------------

struct PuiseuxCluster {
    Rational leading_exponent;
    struct Child {
        std::complex<double> c;
        bool real = false;
        int multiplicity = 0;                // N[.], root count with multiplicity
        int distinct_roots = 0;              // distinct expansions below this child
        bool separated = true;               // splitting certified to depth
        std::vector<PuiseuxCluster> clusters;  // deeper splitting
        std::vector<RootBranch> roots;       // the roots of this child (tails relative to nothing; full series)
    };
    std::vector<Child> children;

    int multiplicity() const {
        int n = 0;
        for (const auto& ch : children) n += ch.multiplicity;
        return n;
    }
};

struct ClusterTree {
    int nu1 = 0;
    int n_all = 0;
    std::vector<PuiseuxCluster> clusters;  // ascending leading exponent
    bool fully_separated = true;
};

namespace detail {

/// Groups root tails by (exponent, coefficient) at term position `level`.
inline std::vector<PuiseuxCluster> build_clusters(const std::vector<RootBranch>& roots, std::size_t level,
                                                  bool& separated_flag) {
    std::map<Rational, std::vector<const RootBranch*>> by_exp;
    for (const auto& r : roots) {
        if (r.series.terms.size() <= level) continue;  // exact tail at this prefix
        by_exp[r.series.terms[level].exponent].push_back(&r);
    }
    std::vector<PuiseuxCluster> out;
    for (auto& [a, members] : by_exp) {
        PuiseuxCluster cl;
        cl.leading_exponent = a;
        double scale = 0;
        for (auto* r : members) scale = std::max(scale, std::abs(r->series.terms[level].coeff));
        std::vector<std::vector<const RootBranch*>> groups;
        std::vector<std::complex<double>> reps;
        for (auto* r : members) {
            std::complex<double> c = r->series.terms[level].coeff;
            bool placed = false;
            for (std::size_t g = 0; g < reps.size(); ++g) {
                double d = std::abs(reps[g] - c);
                if (d <= 1e-9 * scale) {
                    groups[g].push_back(r);
                    placed = true;
                    break;
                }
                if (d <= 1e-6 * scale)
                    throw puiseux_error("cluster coefficients closer than the separation tolerance");
            }
            if (!placed) {
                reps.push_back(c);
                groups.push_back({r});
            }
        }
        for (std::size_t g = 0; g < reps.size(); ++g) {
            PuiseuxCluster::Child ch;
            ch.c = reps[g];
            ch.real = std::abs(reps[g].imag()) <= 1e-9 * std::max(1.0, std::abs(reps[g]));
            for (auto* r : groups[g]) {
                ch.multiplicity += r->multiplicity;
                ch.roots.push_back(*r);
                if (!r->series.separated) {
                    ch.separated = false;
                    separated_flag = false;
                }
            }
            ch.distinct_roots = static_cast<int>(groups[g].size());
            ch.clusters = build_clusters(ch.roots, level + 1, separated_flag);
            cl.children.push_back(std::move(ch));
        }
        std::sort(cl.children.begin(), cl.children.end(),
                  [](const PuiseuxCluster::Child& x, const PuiseuxCluster::Child& y) {
                      if (x.c.real() != y.c.real()) return x.c.real() < y.c.real();
                      return x.c.imag() < y.c.imag();
                  });
        out.push_back(std::move(cl));
    }
    return out;  // std::map iteration already sorts by exponent
}

}  // namespace detail

/// Groups the expanded roots into the tree of clusters: by leading exponent,
/// then by leading coefficient, recursively. Conjugate closure is verified
/// (the phase is real, so complex roots pair up within a cluster).
inline ClusterTree cluster_tree(const PuiseuxRootData& data) {
    ClusterTree tree;
    tree.nu1 = data.nu1;
    tree.n_all = data.nu1;
    for (const auto& r : data.roots) tree.n_all += r.multiplicity;
    tree.clusters = detail::build_clusters(data.roots, 0, tree.fully_separated);
    for (const auto& cl : tree.clusters) {
        for (const auto& ch : cl.children) {
            if (ch.real) continue;
            bool paired = false;
            for (const auto& other : cl.children)
                if (std::abs(other.c - std::conj(ch.c)) <= 1e-7 * std::max(1.0, std::abs(ch.c)) &&
                    other.multiplicity == ch.multiplicity)
                    paired = true;
            if (!paired) throw puiseux_error("complex cluster coefficient without a conjugate partner");
        }
    }
    return tree;
}

struct VertexData {
    std::vector<PointQ> vertices;   // (B_l, A_l), l = 0..L
    std::vector<Rational> slopes;   // a_l, l = 1..L
};

/// (B_l, A_l) from cluster exponents and multiplicities: B_l counts the roots
/// with leading exponent strictly greater than a_l (trivial roots included),
/// A_l accumulates a_mu N_mu over the clusters up to l.
inline VertexData vertex_data(const ClusterTree& tree) {
    VertexData out;
    int total = tree.n_all;
    out.vertices.push_back({Rational(total), Rational(0)});
    Rational acc_a = 0;
    int seen = 0;
    for (const auto& cl : tree.clusters) {
        int n_mu = cl.multiplicity();
        acc_a += cl.leading_exponent * n_mu;
        seen += n_mu;
        out.vertices.push_back({Rational(total - seen), acc_a});
        out.slopes.push_back(cl.leading_exponent);
    }
    return out;
}

/// Factored kappa^l-principal part: constant, trivial powers, and the
/// per-coefficient linear factors with their cluster multiplicities.
struct EdgePrincipalPart {
    double constant = 0;
    int z_power = 0;          // B_l
    Rational s_power = 0;     // A_{l-1}
    Rational exponent = 0;    // a_l
    std::vector<std::pair<std::complex<double>, int>> factors;  // (c, N)
};

inline EdgePrincipalPart principal_part_of_edge(const TruncatedSeries& phi, const ClusterTree& tree, std::size_t l,
                                                double rel_tol = 1e-8) {
    if (l < 1 || l > tree.clusters.size()) throw puiseux_error("no such edge");
    VertexData vd = vertex_data(tree);
    EdgePrincipalPart out;
    out.exponent = tree.clusters[l - 1].leading_exponent;
    out.z_power = static_cast<int>(to_long(vd.vertices[l].b));
    out.s_power = vd.vertices[l - 1].a;
    for (const auto& ch : tree.clusters[l - 1].children) out.factors.emplace_back(ch.c, ch.multiplicity);
    // the constant is the coefficient at the right endpoint (B_{l-1}, A_{l-1})
    Rational b_right = vd.vertices[l - 1].b;
    Rational a_right = vd.vertices[l - 1].a;
    if (!is_integer(b_right) || !is_integer(a_right))
        throw puiseux_error("edge endpoint is not a lattice point of the input phase");
    out.constant = to_double(phi.poly().coeff(static_cast<int>(to_long(b_right)), static_cast<int>(to_long(a_right))));
    if (out.constant == 0) throw puiseux_error("vertex coefficient vanished");

    // verify: expanding the factored form reproduces the principal part
    Rational denom = vd.vertices[l].a + out.exponent * vd.vertices[l].b;  // A_l + a_l B_l
    Weight kappa{out.exponent / denom, 1 / denom};
    std::map<PhaseKey, std::complex<double>> acc;
    acc[{0, out.s_power}] = out.constant;
    for (const auto& [c, n] : out.factors)
        for (int rep = 0; rep < n; ++rep) {
            std::map<PhaseKey, std::complex<double>> next;
            for (const auto& [k, v] : acc) {
                next[{k.zdeg + 1, k.sexp}] += v;
                next[{k.zdeg, k.sexp + out.exponent}] -= v * c;
            }
            acc = std::move(next);
        }
    PhasePolynomial expanded;
    for (const auto& [k, v] : acc) {
        PhaseKey key{k.zdeg + out.z_power, k.sexp};
        if (std::abs(v) > 1e-13 * std::abs(out.constant)) expanded.terms[key] = v.real();
    }
    LatticePolynomial pr = principal_part(phi.poly(), kappa);
    double scale = 0;
    for (const auto& [m, c] : pr.terms()) scale = std::max(scale, std::abs(to_double(c)));
    for (const auto& [m, c] : pr.terms()) {
        auto it = expanded.terms.find({m.e1, Rational(m.e2)});
        double got = it == expanded.terms.end() ? 0.0 : it->second;
        if (std::abs(got - to_double(c)) > rel_tol * scale)
            throw puiseux_error("factored principal part does not match the polynomial expansion");
    }
    return out;
}

/// Builds U with d^2/dz^2 (U(z) z^{B+2}) = V(z) z^B for a Laurent profile
/// V = sum_{k >= -B} rho_k z^k: the transition-domain reconstruction, applied
/// twice.
inline std::map<int, Rational> integrate_profile_twice(const std::map<int, Rational>& v, int B) {
    std::map<int, Rational> u;
    for (const auto& [k, rho] : v) {
        if (k < -B) throw puiseux_error("profile term below the z^{-B} floor");
        u[k] = rho / ((B + k + 1) * (B + k + 2));
    }
    return u;
}

}  // namespace singscope
