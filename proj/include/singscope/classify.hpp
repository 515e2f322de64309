#pragma once

#include <optional>
#include <string>
#include <vector>

#include "newton.hpp"
#include "series.hpp"
#include "upoly.hpp"

namespace singscope {

class classify_error : public std::runtime_error {
  public:
    explicit classify_error(const std::string& what) : std::runtime_error("classify: " + what) {}
};

enum class SingularityClass { A_minus, A_plus_generic, A_e, not_A_type };

inline std::string to_string(SingularityClass c) {
    switch (c) {
        case SingularityClass::A_minus: return "A_minus";
        case SingularityClass::A_plus_generic: return "A_plus_generic";
        case SingularityClass::A_e: return "A_e";
        default: return "not_A_type";
    }
}

/// Data of the normal form b(x1,x2)(x2 - psi(x1))^2 + b0(x1):
/// psi is the x2-critical curve, b0 its restriction to phi.
struct NormalFormData {
    TruncatedSeries psi;  // series in x1
    TruncatedSeries b0;   // series in x1, = x1^n beta(x1)
    int n = 0;
    std::optional<int> m;  // empty: psi vanishes through the working order
    Rational beta0;
    std::optional<Rational> omega0;
    bool psi_exactly_zero = false;
};

/// Edge data of N(phi_red) at the vertex (n,0): the weight kappa^e of the
/// first non-horizontal edge, the coordinate-dependent multiplicity
/// n_e^coords = (1 - kappa^e_2) n, and the principal part on that edge.
struct EffectiveData {
    Weight kappa_e;
    Rational n_e_coords;
    LatticePolynomial p;
    bool certified = true;  // false when a vertical edge cannot be certified at finite order
};

struct LineAdaptResult {
    TruncatedSeries alpha;    // series in x2; zero when input was line-adapted
    TruncatedSeries phi_la;   // phi in the sheared coordinates
    Rational n_e;
    EffectiveData eff;        // effective data in the line-adapted coordinates
    bool already_adapted = false;
};

struct ReportFlags {
    bool line_adapted_input = false;
    bool kappa2_zero = false;
    bool m_exceeds_order = false;
    bool vertical_edge_uncertified = false;
};

struct ClassificationReport {
    SingularityClass cls = SingularityClass::not_A_type;
    int n = 0;
    std::optional<int> m;
    Rational h;
    std::optional<Weight> kappa_e;     // line-adapted weight (A+ only)
    std::optional<Rational> n_e_x;     // effective multiplicity in input coordinates
    std::optional<Rational> n_e;       // effective multiplicity (A+ only)
    std::optional<Rational> p_e;
    Rational p_c_lower;                // point value when lower == upper
    Rational p_c_upper;
    std::vector<TruncatedSeries> coord_chain;  // applied shears alpha(x2)
    ReportFlags flags;
    NormalFormData normal_form;
    std::optional<LatticePolynomial> principal_p;  // line-adapted principal part

    bool p_c_is_point() const { return p_c_lower == p_c_upper; }
};

namespace detail {

inline void swap_vars_inplace(TruncatedSeries& s) { s = TruncatedSeries(s.poly().swapped(), s.valid_order()); }

}  // namespace detail

/// Extracts the normal-form data. The input must already be linearly adapted:
/// phi(0)=0, grad phi(0)=0, Hessian diag(0, c) with c != 0 (validated, not
/// repaired: a general rotation would leave the rational coefficient ring).
inline NormalFormData normal_form(const TruncatedSeries& phi, int order) {
    const LatticePolynomial& f = phi.poly();
    if (f.coeff(0, 0) != 0 || f.coeff(1, 0) != 0 || f.coeff(0, 1) != 0)
        throw classify_error("input must vanish to second order at the origin");
    if (f.coeff(0, 2) == 0) throw classify_error("Hessian precondition fails: d2^2 phi(0,0) = 0");
    if (f.coeff(2, 0) != 0 || f.coeff(1, 1) != 0)
        throw classify_error("input is not linearly adapted (Hessian must be diag(0, c))");
    if (order < 3) throw classify_error("working order too small");
    int work = std::min(order, phi.valid_order());

    // psi solves d2 phi(x1, psi(x1)) = 0; swap slots so the unknown sits in
    // the first variable of the implicit solver.
    TruncatedSeries dphi2 = phi.derivative(2);
    TruncatedSeries swapped(dphi2.poly().swapped(), dphi2.valid_order());
    TruncatedSeries psi_sw = solve_implicit(swapped, std::min(work, swapped.valid_order()));
    NormalFormData nf;
    nf.psi = TruncatedSeries(psi_sw.poly().swapped(), psi_sw.valid_order());
    // psi == 0 identically iff d2 phi(x1, 0) == 0 as a polynomial; decidable
    // exactly for exact input.
    bool d2_vanishes_on_axis = true;
    for (const auto& [mm, c] : dphi2.poly().terms())
        if (mm.e2 == 0) d2_vanishes_on_axis = false;

    TruncatedSeries x1 = TruncatedSeries::var1();
    nf.b0 = subst(phi.poly(), x1, nf.psi, work);
    nf.b0 = nf.b0.capped(std::min(nf.b0.valid_order(), phi.valid_order()));
    if (nf.b0.is_zero())
        throw classify_error("not of finite A-type within order " + std::to_string(work) +
                             " (b0 vanishes to the full truncation order)");
    nf.n = nf.b0.poly().order(0);
    if (nf.n < 3) throw classify_error("b0 vanishes to order " + std::to_string(nf.n) + " < 3: not A-type with n >= 3");
    nf.beta0 = nf.b0.poly().coeff(nf.n, 0);

    if (nf.psi.is_zero()) {
        nf.psi_exactly_zero = phi.is_exact() && d2_vanishes_on_axis;
    } else {
        int m = nf.psi.poly().order(0);
        nf.m = m;
        nf.omega0 = nf.psi.poly().coeff(m, 0);
        if (m < 2) throw classify_error("psi has order " + std::to_string(m) + " < 2: input not linearly adapted");
    }
    return nf;
}

/// A_minus iff n >= 2m (m infinite counts as A_plus); cross-checked against
/// the principal-face characterization of the A+ property.
inline SingularityClass split_class(const NormalFormData& nf, const TruncatedSeries& phi) {
    bool a_minus_by_order = nf.m.has_value() && nf.n >= 2 * (*nf.m);

    // Principal-face test: with kappa = (1/n, 1/2), every support point has
    // kappa-degree >= 1 and only (0,2) and (n,0) attain equality.
    Weight kappa{rat(1, nf.n), rat(1, 2)};
    bool face_ok = true;
    bool saw_02 = false, saw_n0 = false;
    for (const auto& [mm, c] : phi.poly().terms()) {
        Rational d = kappa.degree_of(mm);
        if (d < 1) {
            face_ok = false;
            break;
        }
        if (d == 1) {
            if (mm.e1 == 0 && mm.e2 == 2)
                saw_02 = true;
            else if (mm.e1 == nf.n && mm.e2 == 0)
                saw_n0 = true;
            else
                face_ok = false;
        }
    }
    bool a_plus_by_face = face_ok && saw_02 && saw_n0;
    if (a_plus_by_face == a_minus_by_order)
        throw classify_error("class split inconsistency between the normal form and the principal face");
    return a_minus_by_order ? SingularityClass::A_minus : SingularityClass::A_plus_generic;
}

/// Edge data of N(phi_red) at (n, 0). phi_red = phi - phi(0, .).
inline EffectiveData effective_data(const TruncatedSeries& phi_tilde, int n, bool throw_uncertified = true) {
    TruncatedSeries phi_red = phi_tilde - TruncatedSeries(phi_tilde.poly().slice_var2(), phi_tilde.valid_order());
    const LatticePolynomial& red = phi_red.poly();
    if (red.coeff(n, 0) == 0) throw classify_error("(n,0) carries no coefficient in phi_red");
    for (const auto& [mm, c] : red.terms())
        if (mm.e2 == 0 && mm.e1 < n) throw classify_error("(n,0) is not a vertex of N(phi_red)");

    EffectiveData eff;
    eff.kappa_e.k1 = rat(1, n);
    eff.kappa_e.k2 = 0;
    for (const auto& [mm, c] : red.terms()) {
        if (mm.e1 >= n) continue;
        Rational cand = (1 - Rational(mm.e1) / n) / mm.e2;  // e2 > 0 here
        eff.kappa_e.k2 = max(eff.kappa_e.k2, cand);
    }
    if (eff.kappa_e.k2 > 0) {
        // Certify: unknown tail terms (total degree > valid) must lie strictly
        // above the supporting line.
        if (!phi_red.is_exact()) {
            Rational worst = Rational(phi_red.valid_order() + 1) * min(eff.kappa_e.k1, eff.kappa_e.k2);
            if (worst <= 1) {
                if (throw_uncertified)
                    throw classify_error("truncation order too small to certify the first edge of N(phi_red)");
                eff.certified = false;
            }
        }
        for (const auto& [mm, c] : red.terms())
            if (eff.kappa_e.degree_of(mm) == 1) eff.p.set(mm, c);
    } else {
        // Vertical edge: content of the line t1 = n. Verticality is certified
        // only for exact inputs.
        eff.certified = phi_red.is_exact();
        for (const auto& [mm, c] : red.terms())
            if (mm.e1 == n) eff.p.set(mm, c);
    }
    eff.n_e_coords = (1 - eff.kappa_e.k2) * n;
    return eff;
}

namespace detail {

/// Edge polynomial of a kappa-homogeneous part along its supporting line,
/// collapsed to one variable: E(t) = q(t, 1).
inline UPoly edge_polynomial_in_x1(const LatticePolynomial& q) {
    UPoly e;
    for (const auto& [m, c] : q.terms()) {
        if (static_cast<std::size_t>(m.e1) >= e.size()) e.resize(m.e1 + 1, Rational(0));
        e[m.e1] += c;
    }
    unormalize(e);
    return e;
}

/// Conditions (a)-(c) characterizing a NOT line-adapted coordinate system:
/// (a) the first edge is compact, (b) its slope ratio k1/k2 is a positive
/// integer, (c) d1 of the edge principal part is a constant times
/// (x1 - c x2^k)^(n-1) with rational c != 0. All decided exactly.
struct AdaptTest {
    bool not_adapted = false;
    long k = 0;       // kappa1/kappa2 when integer
    Rational c;       // (c) root when present
};

inline AdaptTest test_not_line_adapted(const EffectiveData& eff, int n) {
    AdaptTest t;
    if (eff.kappa_e.k2 == 0) return t;                       // (a) fails
    Rational ratio = eff.kappa_e.k1 / eff.kappa_e.k2;
    if (!is_integer(ratio) || ratio < 1) return t;           // (b) fails
    t.k = to_long(ratio);
    UPoly e = edge_polynomial_in_x1(eff.p.derivative(1));
    auto c = uis_power_of_linear(e, n - 1);
    if (!c) return t;                                        // (c) fails
    t.not_adapted = true;
    t.c = *c;
    return t;
}

}  // namespace detail

/// Constructs line-adapted coordinates. When conditions (a)-(c) all hold the
/// shear alpha is the implicit solution of d1^{n-1} phi = 0 (preceded by one
/// linear shear when alpha would have order 1); otherwise the input
/// coordinates are already line-adapted and alpha = 0.
inline LineAdaptResult line_adapt(const TruncatedSeries& phi, int order) {
    int work = std::min(order, phi.valid_order());
    TruncatedSeries cur = phi;
    TruncatedSeries alpha_total(LatticePolynomial(), work);
    int n = 0;
    {
        // n from the vertex (n,0) of N(phi_red): the vanishing order of phi(x1, 0).
        LatticePolynomial restr;
        for (const auto& [mm, c] : phi.poly().terms())
            if (mm.e2 == 0) restr.set(mm, c);
        if (restr.is_zero()) throw classify_error("phi(x1,0) vanishes identically: no vertex (n,0)");
        n = restr.order(0);
    }

    for (int pass = 0; pass < 2; ++pass) {
        EffectiveData eff = effective_data(cur, n);
        detail::AdaptTest t = detail::test_not_line_adapted(eff, n);
        if (!t.not_adapted) {
            LineAdaptResult r;
            r.alpha = alpha_total;
            r.phi_la = cur;
            r.n_e = eff.n_e_coords;
            r.eff = eff;
            r.already_adapted = alpha_total.is_zero();
            return r;
        }
        TruncatedSeries dphi = cur;
        for (int i = 0; i < n - 1; ++i) dphi = dphi.derivative(1);
        TruncatedSeries alpha = solve_implicit(dphi, std::min(work, dphi.valid_order()));
        if (alpha.is_zero()) throw classify_error("line adaptation produced a zero shear under conditions (a)-(c)");
        if (alpha.poly().order(0) == 1 && pass == 0) {
            // Linear-order shear: apply just the linear part first, then redo.
            Rational c1 = alpha.poly().coeff(0, 1);
            TruncatedSeries lin(LatticePolynomial::term(c1, 0, 1), work);
            cur = shear_substitute(cur, lin, work);
            alpha_total = alpha_total + lin;
            continue;
        }
        cur = shear_substitute(cur, alpha, work);
        alpha_total = alpha_total + alpha;
        EffectiveData eff2 = effective_data(cur, n, /*throw_uncertified=*/false);
        if (detail::test_not_line_adapted(eff2, n).not_adapted)
            throw classify_error("coordinates not line-adapted after one pass");
        LineAdaptResult r;
        r.alpha = alpha_total;
        r.phi_la = cur;
        r.n_e = eff2.n_e_coords;
        r.eff = eff2;
        r.already_adapted = false;
        return r;
    }
    throw classify_error("line adaptation did not settle after the linear pre-shear");
}

/// True iff the line-adapted principal part has the exceptional shape
/// y1^n + c1 y1 y2^(beta+2): either (A1) fails (the second x1-derivative of p
/// is a single monomial) or (A2) fails (it is a constant times
/// (y1 - c y2^a)^(n-2); the shift u1 = y1 - c y2^a then lands in that shape,
/// which is confirmed).
inline bool detect_Ae(const LatticePolynomial& p, const Weight& kappa_e, int n) {
    if (kappa_e.k2 == 0) return false;
    LatticePolynomial p2 = p.derivative(1).derivative(1);
    if (p2.is_zero()) throw classify_error("degenerate principal part");
    if (p2.term_count() == 1) {
        const auto& [mm, c] = *p2.terms().begin();
        if (!(mm.e1 == n - 2 && mm.e2 == 0)) throw classify_error("principal part misses the x1^n vertex");
        return true;  // (A1) fails
    }
    Rational ratio = kappa_e.k1 / kappa_e.k2;
    if (!is_integer(ratio) || ratio < 1) return false;  // integer exponent impossible, (A2) holds
    long a = to_long(ratio);
    UPoly e = detail::edge_polynomial_in_x1(p2);
    auto c = uis_power_of_linear(e, n - 2);
    if (!c) return false;  // (A2) holds
    // u-shift: confirm the exceptional shape in the shifted coordinates.
    TruncatedSeries shift(LatticePolynomial::term(*c, 0, static_cast<int>(a)));
    TruncatedSeries shifted = shear_substitute(TruncatedSeries(p), shift);
    bool has_mixed = false;
    for (const auto& [mm, cc] : shifted.poly().terms()) {
        if (mm.e1 == n && mm.e2 == 0) continue;
        if (mm.e1 == 0) continue;  // pure y2 content moves into phi(0, y2)
        if (mm.e1 == 1 && mm.e2 == static_cast<int>(a) * (n - 1)) {
            has_mixed = true;
            continue;
        }
        throw classify_error("maximal-vanishing shift did not land in the exceptional shape");
    }
    if (!has_mixed) throw classify_error("exceptional shift lost the mixed term (coordinates were not line-adapted)");
    return true;
}

/// Full classification: normal form, class split, line adaptation, effective
/// multiplicity and the critical exponent. Exact rationals throughout.
inline ClassificationReport classify(const TruncatedSeries& phi, int order) {
    ClassificationReport rep;
    rep.normal_form = normal_form(phi, order);
    rep.n = rep.normal_form.n;
    rep.m = rep.normal_form.m;
    rep.h = rat(2 * rep.n, rep.n + 2);
    rep.flags.m_exceeds_order = !rep.normal_form.m.has_value() && !rep.normal_form.psi_exactly_zero;

    rep.cls = split_class(rep.normal_form, phi);
    if (rep.cls == SingularityClass::A_minus) {
        rep.p_c_lower = rep.p_c_upper = max(rat(3, 2), rep.h);
        return rep;
    }

    EffectiveData eff_x = effective_data(phi, rep.n);
    rep.n_e_x = eff_x.n_e_coords;
    LineAdaptResult la = line_adapt(phi, order);
    rep.flags.line_adapted_input = la.already_adapted;
    rep.flags.kappa2_zero = la.eff.kappa_e.k2 == 0;
    rep.flags.vertical_edge_uncertified = !la.eff.certified;
    if (!la.alpha.is_zero()) rep.coord_chain.push_back(la.alpha);
    rep.kappa_e = la.eff.kappa_e;
    rep.n_e = la.n_e;
    rep.p_e = 2 * la.n_e / (la.n_e + 1);
    rep.principal_p = la.eff.p;

    bool exceptional = detect_Ae(la.eff.p, la.eff.kappa_e, rep.n);
    rep.cls = exceptional ? SingularityClass::A_e : SingularityClass::A_plus_generic;

    // sanity: n/2 < n_e <= n, and p_e > h when n >= 4
    if (!(2 * (*rep.n_e) > rep.n && *rep.n_e <= rep.n))
        throw classify_error("effective multiplicity out of range (n/2, n]");
    if (rep.n >= 4 && !(*rep.p_e > rep.h)) throw classify_error("p_e <= h for an A+ singularity with n >= 4");

    if (rep.n == 3) {
        // A_2 singularities were settled before this machinery: p > 3/2 is
        // sufficient and necessary.
        rep.p_c_lower = rep.p_c_upper = rat(3, 2);
        return rep;
    }
    if (rep.cls == SingularityClass::A_plus_generic) {
        rep.p_c_lower = rep.p_c_upper = max(rat(3, 2), *rep.p_e);
    } else {
        rep.p_c_lower = max(rat(3, 2), *rep.p_e);
        rep.p_c_upper = max(rat(3, 2), rat(2 * rep.n, rep.n + 1));
    }
    return rep;
}

inline ClassificationReport classify(const LatticePolynomial& phi, int order) {
    return classify(TruncatedSeries(phi), order);
}

}  // namespace singscope
