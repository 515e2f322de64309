#pragma once

#include <string>

#include "classify.hpp"

namespace singscope {

class legendre_error : public std::runtime_error {
  public:
    explicit legendre_error(const std::string& what) : std::runtime_error("legendre: " + what) {}
};

enum class LegendreRoute { A_minus_adapted, A_plus_line_adapted };

inline std::string to_string(LegendreRoute r) {
    return r == LegendreRoute::A_minus_adapted ? "A_minus_adapted" : "A_plus_line_adapted";
}

/// Output of the Legendre transform in x2. All series live in the (x1, s2)
/// ring (slot 1 = x1 resp. z1, slot 2 = s2).
struct LegendreData {
    TruncatedSeries x2c;        // critical point x2^c(x1, s2) (in the route's coordinates)
    TruncatedSeries w0;         // x2^c(0, s2) = s2 w0(s2)
    TruncatedSeries B;          // breve(phi)(0, s2) = s2^2 B(s2), after the route's shift
    TruncatedSeries phi_breve;  // full transform, before the line-adapted shift
    TruncatedSeries phi1;       // reduced phase, phi1(0, s2) == 0
    TruncatedSeries alpha_tilde;  // A+ route shift alpha(s2 w0(s2)); zero otherwise
    LegendreRoute route = LegendreRoute::A_plus_line_adapted;
    int n = 0;
    Rational b1_at_0;           // d2^2 phi(0,0) / 2
};

namespace detail {

/// Solves d2 phi(x1, C(x1,s2)) + s2 = 0 with C(0,0) = 0 by series Newton
/// iteration in the (x1, s2) ring.
inline TruncatedSeries critical_point_x2(const TruncatedSeries& phi, int work) {
    LatticePolynomial d1 = phi.poly().derivative(2);
    LatticePolynomial d2 = d1.derivative(2);
    if (d2.coeff(0, 0) == 0) throw legendre_error("degenerate second derivative: d2^2 phi(0,0) = 0");
    TruncatedSeries x1 = TruncatedSeries::var1();
    TruncatedSeries s2 = TruncatedSeries::var2();
    TruncatedSeries c(LatticePolynomial(), work);
    for (int k = 1; k < work + 1; k *= 2) {
        TruncatedSeries num = subst(d1, x1, c, work) + s2;
        TruncatedSeries den = subst(d2, x1, c, work);
        c = (c - (num * reciprocal(den, work)).capped(work)).capped(work);
    }
    c = TruncatedSeries(c.poly(), work);
    // residual check
    TruncatedSeries res = subst(d1, x1, c, work) + s2;
    for (const auto& [m, cc] : res.poly().terms())
        if (m.total() <= work) throw legendre_error("critical point residual check failed");
    return c;
}

}  // namespace detail

/// Legendre transform of phi in x2: the value of phi(x1,.) + s2 . at its
/// critical point. The A- route first passes to the adapted coordinates
/// y2 = x2 - psi(x1) and re-adds the transported s2 psi(x1) term; the A+
/// route applies the line-adapted shift z1 = x1 - alpha(s2 w0(s2)).
inline LegendreData legendre_x2(const TruncatedSeries& phi, int order) {
    if (phi.poly().coeff(0, 2) == 0) throw legendre_error("degenerate second derivative: d2^2 phi(0,0) = 0");
    NormalFormData nf = normal_form(phi, order);
    int work = std::min(order, phi.is_exact() ? order : phi.valid_order() - 1);
    work = std::min(work, kExactOrder - 4);
    if (work < 2) throw legendre_error("order underflow");

    LegendreData out;
    out.n = nf.n;
    out.b1_at_0 = phi.poly().coeff(0, 2);
    bool a_minus = nf.m.has_value() && nf.n >= 2 * (*nf.m);
    out.route = a_minus ? LegendreRoute::A_minus_adapted : LegendreRoute::A_plus_line_adapted;

    TruncatedSeries x1 = TruncatedSeries::var1();
    TruncatedSeries x2 = TruncatedSeries::var2();
    TruncatedSeries s2 = TruncatedSeries::var2();

    // Route-specific base phase.
    TruncatedSeries base = phi;
    if (a_minus) base = subst(phi.poly(), x1, x2 + nf.psi, work).capped(std::min(work, phi.valid_order()));
    if (!base.is_exact()) work = std::min(work, base.valid_order() - 1);
    if (work < 2) throw legendre_error("order underflow");

    TruncatedSeries c = detail::critical_point_x2(base, work);
    out.x2c = c;

    TruncatedSeries breve = subst(base.poly(), x1, c, work).capped(work) + (s2 * c).capped(work);
    if (breve.valid_order() < 2) throw legendre_error("order underflow");
    out.phi_breve = breve;

    // x2^c(0, s2) = s2 w0(s2)
    TruncatedSeries c_at0(c.poly().slice_var2(), c.valid_order());
    out.w0 = divide_var2_power(c_at0, 1);

    TruncatedSeries shifted = breve;
    out.alpha_tilde = TruncatedSeries(LatticePolynomial(), work);
    if (!a_minus) {
        LineAdaptResult la = line_adapt(phi, order);
        if (!la.alpha.is_zero()) {
            TruncatedSeries s2w0 = (s2 * out.w0).capped(work);
            out.alpha_tilde = subst(la.alpha.poly(), x1, s2w0, work);  // alpha depends on slot 2 only
            shifted = shear_substitute(breve, out.alpha_tilde, work);
        }
    }

    TruncatedSeries z_free(shifted.poly().slice_var2(), shifted.valid_order());
    out.B = divide_var2_power(z_free, 2);
    out.phi1 = shifted - z_free;
    if (a_minus) out.phi1 = out.phi1 + (s2 * nf.psi).capped(work);

    // Lemma invariants: B(0) = -1/(4 b1(0)), and phi1(0, s2) == 0.
    if (out.B.poly().coeff(0, 0) != Rational(-1) / (4 * out.b1_at_0))
        throw legendre_error("B(0) != -1/(4 b1(0))");
    for (const auto& [m, cc] : out.phi1.poly().terms())
        if (m.e1 == 0) throw legendre_error("phi1(0, s2) != 0");
    return out;
}

inline LegendreData legendre_x2(const LatticePolynomial& phi, int order) {
    return legendre_x2(TruncatedSeries(phi), order);
}

struct LegendreInvarianceReport {
    Rational n_e_phi;
    Rational n_e_breve;
    SingularityClass cls_phi;
    SingularityClass cls_breve;
    bool n_e_equal = false;
    bool class_preserved = false;
};

/// Computes the effective multiplicity of phi and of its Legendre transform
/// (re-running the full pipeline on breve(phi) as a function of (x1, s2)) and
/// asserts both agree, along with the class tag.
inline LegendreInvarianceReport verify_legendre_invariance(const TruncatedSeries& phi, int order) {
    ClassificationReport rep = classify(phi, order);
    if (rep.cls == SingularityClass::A_minus) throw legendre_error("invariance check requires type A+");
    LegendreData leg = legendre_x2(phi, order);
    ClassificationReport rep_breve = classify(leg.phi_breve, std::min(order, leg.phi_breve.valid_order()));
    LegendreInvarianceReport out;
    out.n_e_phi = *rep.n_e;
    out.n_e_breve = *rep_breve.n_e;
    out.cls_phi = rep.cls;
    out.cls_breve = rep_breve.cls;
    out.n_e_equal = out.n_e_phi == out.n_e_breve;
    out.class_preserved = rep.cls == rep_breve.cls;
    if (!out.n_e_equal) throw legendre_error("effective multiplicity not preserved by the Legendre transform");
    if (!out.class_preserved) throw legendre_error("class not preserved by the Legendre transform");
    return out;
}

}  // namespace singscope
