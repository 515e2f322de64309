#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poly.hpp"

namespace singscope {

class newton_error : public std::runtime_error {
  public:
    explicit newton_error(const std::string& what) : std::runtime_error("newton-geometry: " + what) {}
};

/// A lattice point (t1, t2) = (B, A). Rational coordinates: Newton-Puiseux
/// polyhedra of shifted phases are only fractionally analytic in s2.
struct PointQ {
    Rational b;  // t1
    Rational a;  // t2
    bool operator==(const PointQ& o) const { return b == o.b && a == o.a; }
};

/// Modulus of the slope of a supporting line; infinite for vertical lines.
/// Comparisons are exact (rational cross-multiplication, explicit inf case).
struct Slope {
    bool infinite = false;
    Rational value = 0;

    static Slope inf() { return {true, 0}; }
    static Slope finite(const Rational& v) { return {false, v}; }
    bool operator<(const Slope& o) const {
        if (infinite) return false;
        if (o.infinite) return true;
        return value < o.value;
    }
    bool operator==(const Slope& o) const { return infinite == o.infinite && (infinite || value == o.value); }
};

/// Weight kappa = (k1, k2) of a supporting line {k1 t1 + k2 t2 = 1},
/// k1 > 0, k2 >= 0 (k2 = 0 for vertical lines, slope infinity).
struct Weight {
    Rational k1;
    Rational k2;

    bool vertical() const { return k2 == 0; }
    Slope slope() const { return vertical() ? Slope::inf() : Slope::finite(k1 / k2); }
    Rational degree_of(const PointQ& p) const { return k1 * p.b + k2 * p.a; }
    Rational degree_of(const Monomial& m) const { return k1 * m.e1 + k2 * m.e2; }
};

struct Edge {
    PointQ left;   // (B_l, A_l)
    PointQ right;  // (B_{l-1}, A_{l-1})
    Weight kappa;

    Slope slope() const { return kappa.slope(); }
};

/// Lower-left staircase hull of the union of quadrants (p + R_+^2) over the
/// support. Vertices are listed with B strictly decreasing and A strictly
/// increasing ((B_0,A_0) is the bottom-right vertex); compact edges gamma_l
/// join (B_{l-1},A_{l-1}) to (B_l,A_l), with strictly increasing slopes.
struct NewtonPolyhedron {
    std::vector<PointQ> vertices;
    std::vector<Edge> edges;

    /// Every support point satisfies k1 t1 + k2 t2 >= 1 for each edge weight.
    bool supports(const PointQ& p) const {
        for (const Edge& e : edges)
            if (e.kappa.degree_of(p) < 1) return false;
        if (!vertices.empty()) {
            if (p.b < vertices.back().b) return false;   // left of the vertical ray
            if (p.a < vertices.front().a) return false;  // below the horizontal ray
        }
        return true;
    }
};

inline NewtonPolyhedron newton_polyhedron(std::vector<PointQ> support) {
    if (support.empty()) throw newton_error("empty support");
    for (const auto& p : support)
        if (p.b < 0 || p.a < 0) throw newton_error("negative support coordinate");
    std::sort(support.begin(), support.end(), [](const PointQ& p, const PointQ& q) {
        if (p.b != q.b) return p.b < q.b;
        return p.a < q.a;
    });
    // Pareto-minimal staircase corners (b increasing, a strictly decreasing).
    std::vector<PointQ> corners;
    for (const auto& p : support) {
        if (!corners.empty() && corners.back().b == p.b) continue;
        if (!corners.empty() && p.a >= corners.back().a) continue;
        corners.push_back(p);
    }
    // Lower-left convex chain: keep v between u and w only when strictly
    // below the chord u-w.
    auto strictly_below = [](const PointQ& u, const PointQ& v, const PointQ& w) {
        return (v.a - u.a) * (w.b - u.b) - (w.a - u.a) * (v.b - u.b) < 0;
    };
    std::vector<PointQ> chain;
    for (const auto& p : corners) {
        while (chain.size() >= 2 && !strictly_below(chain[chain.size() - 2], chain.back(), p)) chain.pop_back();
        chain.push_back(p);
    }
    NewtonPolyhedron np;
    np.vertices.assign(chain.rbegin(), chain.rend());  // B decreasing
    for (std::size_t l = 1; l < np.vertices.size(); ++l) {
        const PointQ& lft = np.vertices[l];
        const PointQ& rgt = np.vertices[l - 1];
        Rational da = lft.a - rgt.a;   // > 0
        Rational db = rgt.b - lft.b;   // > 0
        Rational slope = da / db;
        Rational denom = lft.a + slope * lft.b;  // = A_l + a_l B_l > 0
        Edge e{lft, rgt, Weight{slope / denom, 1 / denom}};
        np.edges.push_back(e);
    }
    return np;
}

inline NewtonPolyhedron newton_polyhedron(const LatticePolynomial& p) {
    std::vector<PointQ> pts;
    for (const auto& m : taylor_support(p)) pts.push_back({Rational(m.e1), Rational(m.e2)});
    return newton_polyhedron(pts);
}

/// The coordinate d with (d, d) on the boundary of the polyhedron: the maximum
/// of 1/(k1+k2) over all supporting lines (edges plus the two extreme rays).
inline Rational newton_distance(const NewtonPolyhedron& np) {
    if (np.vertices.empty()) throw newton_error("empty polyhedron");
    Rational d = 0;
    for (const Edge& e : np.edges) d = max(d, 1 / (e.kappa.k1 + e.kappa.k2));
    const PointQ& bottom = np.vertices.front();
    const PointQ& left = np.vertices.back();
    if (left.b > 0) d = max(d, left.b);    // vertical supporting line t1 = B_L
    if (bottom.a > 0) d = max(d, bottom.a);  // horizontal supporting line t2 = A_0
    return d;
}

/// Sum of the terms of minimal kappa-degree (the principal part with respect
/// to the supporting line of that degree).
inline LatticePolynomial principal_part(const LatticePolynomial& p, const Weight& kappa) {
    if (p.is_zero()) throw newton_error("principal part of the zero polynomial");
    if (!(kappa.k1 > 0) || kappa.k2 < 0) throw newton_error("invalid weight");
    std::optional<Rational> best;
    for (const auto& [m, c] : p.terms()) {
        Rational d = kappa.degree_of(m);
        if (!best || d < *best) best = d;
    }
    LatticePolynomial r;
    for (const auto& [m, c] : p.terms())
        if (kappa.degree_of(m) == *best) r.set(m, c);
    return r;
}

/// The t1-coordinate (plus 2) at which the supporting line through (B, A)
/// crosses the horizontal line t2 = 1: equals (A-1)/a + B + 2 and also
/// (1-k2)/k1 + 2; both routes are evaluated and must agree.
inline Rational n_kappa(const Weight& kappa, const PointQ& p) {
    if (kappa.degree_of(p) != 1) throw newton_error("n_kappa: point not on the supporting line");
    if (kappa.vertical()) {
        if (p.a != 1) throw newton_error("n_kappa: vertical line with A != 1");
        return p.b + 2;
    }
    Rational via_line = (1 - kappa.k2) / kappa.k1 + 2;
    Rational a = kappa.k1 / kappa.k2;
    Rational via_point = (p.a - 1) / a + p.b + 2;
    if (via_line != via_point) throw newton_error("n_kappa: internal mismatch");
    return via_line;
}

struct KeyInequalityReport {
    bool holds = false;
    std::vector<Rational> n_values;  // n_{kappa_l}, l = 1..L
    std::vector<Rational> margins;   // n_{kappa_1} - n_{kappa_l}
};

/// Checks that l |-> (A_l - 1)/a_l + B_l + 2 is non-increasing along the
/// compact edges. Requires A_1 >= 1; callers with A_1 < 1 must route through
/// the multiplicity-lemma branch instead.
inline KeyInequalityReport key_inequality_holds(const NewtonPolyhedron& np) {
    if (np.edges.empty()) return {true, {}, {}};
    if (np.vertices[1].a < 1) throw newton_error("key inequality requires A_1 >= 1");
    KeyInequalityReport rep;
    rep.holds = true;
    for (const Edge& e : np.edges) rep.n_values.push_back(n_kappa(e.kappa, e.left));
    for (std::size_t i = 0; i < rep.n_values.size(); ++i) {
        rep.margins.push_back(rep.n_values.front() - rep.n_values[i]);
        if (i > 0 && rep.n_values[i] > rep.n_values[i - 1]) rep.holds = false;
    }
    return rep;
}

}  // namespace singscope
