#pragma once

#include <string>
#include <vector>

#include "classify.hpp"
#include "resolve.hpp"

namespace singscope {

class exponent_error : public std::runtime_error {
  public:
    explicit exponent_error(const std::string& what) : std::runtime_error("exponent-book: " + what) {}
};

/// Per-edge data feeding the dyadic summability inequalities. `a` is the
/// homogeneity of the current shift (the leading jet scale |w| ~ s^a; at Step
/// 1 it equals the first edge slope), `a_tilde` the slope of the edge under
/// consideration. `bound_const` is the ceiling of Lemma-type key inequalities:
/// m for the adapted route, n_e for the line-adapted one.
struct EdgeBudget {
    Rational A;
    Rational B;
    Rational a;
    Rational a_tilde;
    Rational bound_const;
    int n = 0;
};

enum class SummabilityVariant { E_l_step1, E_0_step1, E_l_step2, E_l_step1_Aplus, E_l_step2_Aplus };

inline std::string to_string(SummabilityVariant v) {
    switch (v) {
        case SummabilityVariant::E_l_step1: return "E_l_step1";
        case SummabilityVariant::E_0_step1: return "E_0_step1";
        case SummabilityVariant::E_l_step2: return "E_l_step2";
        case SummabilityVariant::E_l_step1_Aplus: return "E_l_step1_Aplus";
        default: return "E_l_step2_Aplus";
    }
}

struct Margin {
    std::string name;
    Rational value;
};

namespace detail {

/// Margin affine in u = 1/p on (1/2, 2/3]: value = c0 + c1 u. The exponent of
/// 2^j after maximizing over the admissible k-range.
struct AffineMargin {
    std::string name;
    Rational c0;
    Rational c1;
    Rational at_u(const Rational& u) const { return c0 + c1 * u; }
    /// least u where the margin vanishes (margins increase with u)
    Rational crossing_u() const {
        if (!(c1 > 0)) throw exponent_error("margin is not strictly decreasing in p");
        return -c0 / c1;
    }
};

/// Folds the k-exponent into the j-exponent over the range k <= j / a_tilde:
/// the sup of j X + k Y is j (X + max(0, Y)/a_tilde).
inline AffineMargin fold(const std::string& name, const Rational& xj0, const Rational& xj1, const Rational& yk0,
                         const Rational& yk1, const Rational& a_tilde, const Rational& u_probe) {
    AffineMargin m{name, xj0, xj1};
    Rational y_at_probe = yk0 + yk1 * u_probe;
    if (y_at_probe > 0) {
        m.c0 += yk0 / a_tilde;
        m.c1 += yk1 / a_tilde;
    }
    return m;
}

inline std::vector<AffineMargin> build_margins(const EdgeBudget& b, SummabilityVariant variant,
                                               const Rational& u_probe) {
    std::vector<AffineMargin> out;
    Rational A = b.A, B = b.B;
    if (variant == SummabilityVariant::E_0_step1) {
        // sum over k >= j / a_1 with d_{j,k}^{-1} = 2^{jn}: the k-coefficient
        // -(2/p - 1) is negative, so the minimum k = j/a_1 is binding.
        Rational inv_a = b.a > 0 ? 1 / b.a : Rational(0);  // 0 encodes a_1 = infinity
        Rational eff = Rational(b.n) - inv_a;              // = m resp. n_e
        out.push_back({"interp_k", -eff - 1, 2 * eff});    // eff (2u - 1) - 1
        out.push_back({"interp_plain", -Rational(b.n) / 2 - 1, Rational(b.n)});  // n (u - 1/2) - 1
        return out;
    }
    // E_l families; k ranges over k <= j / a_tilde.
    // interp_k: (2^{k(A-1)+j(B+2)})^{2/p-1} 2^{-j}
    out.push_back(fold("interp_k", -(B + 2) - 1, 2 * (B + 2), -(A - 1), 2 * (A - 1), b.a_tilde, u_probe));
    // interp_plain: (2^{kA+j(B+2)})^{1/p-1/2} 2^{-j}
    out.push_back(fold("interp_plain", -(B + 2) / 2 - 1, B + 2, -A / 2, A, b.a_tilde, u_probe));
    if (variant == SummabilityVariant::E_l_step2 || variant == SummabilityVariant::E_l_step2_Aplus) {
        // tail_k: (d^{-1})^{1/p-1/2} 2^{-k(2/p-1)} 2^{-j(2-2/p)}
        out.push_back(
            fold("tail_k", -(B + 2) / 2 - 2, (B + 2) + 2, -(A - 2) / 2, A - 2, b.a_tilde, u_probe));
        // tail_slope: (d^{-1})^{1/p-1/2} 2^{-k a'(2/p-1)} 2^{-j(2-2/p)};
        // admissible a' is either >= 1 (then dominated by a' = 1) or equals
        // the shift homogeneity a, so the worst case is min(a, 1)
        Rational aeff = min(b.a, Rational(1));
        out.push_back(fold("tail_slope", -(B + 2) / 2 - 2, (B + 2) + 2, -(A - 2 * aeff) / 2, A - 2 * aeff, b.a_tilde,
                           u_probe));
    }
    return out;
}

inline void consistency_check(const EdgeBudget& b) {
    if (b.A >= 1 && b.a_tilde > 0) {
        Rational v = (b.A - 1) / b.a_tilde + b.B + 2;
        if (v > b.bound_const)
            throw exponent_error("key-inequality budget violated: (A-1)/a + B + 2 = " + to_string(v) + " > " +
                                 to_string(b.bound_const));
    }
}

}  // namespace detail

/// Exact margins (j-exponents at eps' = 0) of the dyadic sums for a given
/// Lebesgue exponent p. Negative margins mean summable with room for some
/// eps' > 0.
inline std::vector<Margin> summability_margins(const EdgeBudget& budget, const Rational& p,
                                               SummabilityVariant variant) {
    if (p < rat(3, 2) || p >= 2) throw exponent_error("p outside [3/2, 2)");
    if (variant != SummabilityVariant::E_0_step1) detail::consistency_check(budget);
    Rational u = 1 / p;
    std::vector<Margin> out;
    for (const auto& am : detail::build_margins(budget, variant, u)) out.push_back({am.name, am.at_u(u)});
    return out;
}

struct ClassParams {
    bool a_plus = false;
    int n = 0;
    Rational bound_const;  // m for the adapted route, n_e for the line-adapted one
    Rational a1;           // 1/(n-m) resp. 1/(n-n_e); 0 encodes an infinite slope
};

struct PredictedPc {
    Rational p_c;
    Rational least_crossing;                   // before the max with 3/2
    std::vector<std::pair<std::string, Rational>> crossings;  // per margin family
};

/// Recovers the critical exponent from resolution data: the least p making
/// every margin of every step and edge strictly negative, floored at 3/2.
/// Margins are affine in 1/p on the relevant range, so the threshold is the
/// exact maximum of the per-margin zero crossings.
inline PredictedPc predicted_pc(const std::vector<ResolutionStep>& steps, const ClassParams& params) {
    PredictedPc out;
    Rational u_hi = rat(2, 3);  // evaluate k-range folding on p in [3/2, 2)
    std::vector<std::pair<std::string, detail::AffineMargin>> margins;

    EdgeBudget e0;
    e0.n = params.n;
    e0.a = params.a1;
    e0.a_tilde = params.a1;
    e0.bound_const = params.bound_const;
    for (const auto& am : detail::build_margins(e0, SummabilityVariant::E_0_step1, u_hi))
        margins.emplace_back("E_0", am);

    for (const auto& step : steps) {
        SummabilityVariant variant;
        if (step.step_index == 1)
            variant = params.a_plus ? SummabilityVariant::E_l_step1_Aplus : SummabilityVariant::E_l_step1;
        else
            variant = params.a_plus ? SummabilityVariant::E_l_step2_Aplus : SummabilityVariant::E_l_step2;
        Rational shift_a = step.jet.empty() ? (step.first_edge_slope > 0 ? step.first_edge_slope : Rational(1))
                                            : step.jet.back().exponent;
        for (const auto& edge : step.polyhedron.edges) {
            EdgeBudget b;
            b.A = edge.left.a;
            b.B = edge.left.b;
            b.a_tilde = edge.slope().value;
            b.a = shift_a;
            b.bound_const = params.bound_const;
            b.n = params.n;
            if (b.A >= 1) detail::consistency_check(b);
            std::string tag = "step" + std::to_string(step.step_index);
            for (const auto& am : detail::build_margins(b, variant, u_hi)) margins.emplace_back(tag, am);
        }
    }

    // Every margin is negative exactly for u = 1/p below its crossing, so
    // p must exceed the largest reciprocal crossing.
    Rational best_u = 1;
    for (auto& [tag, am] : margins) {
        Rational cross_u = am.crossing_u();
        out.crossings.emplace_back(tag + ":" + am.name, cross_u > 0 ? 1 / cross_u : Rational(0));
        best_u = min(best_u, cross_u);
    }
    if (!(best_u > rat(1, 2))) throw exponent_error("margins never turn negative on (3/2, 2)");
    out.least_crossing = 1 / best_u;
    out.p_c = max(rat(3, 2), out.least_crossing);
    return out;
}

}  // namespace singscope
