#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "singscope/classify.hpp"
#include "singscope/parse.hpp"

using namespace singscope;

namespace {

std::mt19937_64 rng(55100234);

Rational small_rat() {
    long num = static_cast<long>(rng() % 9) - 4;
    long den = 1 + static_cast<long>(rng() % 3);
    return rat(num, den);
}

/// Random A-type input built directly from the normal form
/// u(x) (x2 - psi(x1))^2 + x1^n beta(x1), so psi and b0 are known exactly.
struct NormalFormSample {
    LatticePolynomial phi;
    LatticePolynomial psi;
    LatticePolynomial b0;
    int n;
    int m;  // 0 encodes psi == 0
};

NormalFormSample sample_a_type(int n, int m) {
    NormalFormSample s;
    s.n = n;
    s.m = m;
    LatticePolynomial u = LatticePolynomial::constant(rat(1 + static_cast<long>(rng() % 3)));
    for (int t = 0; t < 2; ++t) {
        int e1 = static_cast<int>(rng() % 3), e2 = static_cast<int>(rng() % 3);
        if (e1 + e2 == 0) continue;
        u.add_term({e1, e2}, small_rat());
    }
    if (m > 0) {
        s.psi = LatticePolynomial::term(rat(1 + static_cast<long>(rng() % 2)), m, 0);
        if (rng() % 2) s.psi.add_term({m + 1, 0}, small_rat());
    }
    LatticePolynomial beta = LatticePolynomial::constant(rat(1 + static_cast<long>(rng() % 2)));
    if (rng() % 2) beta.add_term({1, 0}, small_rat());
    s.b0 = LatticePolynomial::term(Rational(1), n, 0) * beta;
    LatticePolynomial x2 = LatticePolynomial::var2();
    LatticePolynomial w = x2 - s.psi;
    s.phi = u * w * w + s.b0;
    return s;
}

}  // namespace

TEST_CASE("normal form: explicit A- model") {
    NormalFormData nf = normal_form(TruncatedSeries(parse_poly("(x2 - x1^2)^2 + x1^5")), 20);
    REQUIRE(nf.psi.poly() == parse_poly("x1^2"));
    REQUIRE(nf.b0.poly() == parse_poly("x1^5"));
    REQUIRE(nf.n == 5);
    REQUIRE(nf.m.has_value());
    REQUIRE(*nf.m == 2);
    REQUIRE(nf.beta0 == 1);
    REQUIRE(*nf.omega0 == 1);
}

TEST_CASE("normal form: vertical model has flat psi") {
    NormalFormData nf = normal_form(TruncatedSeries(parse_poly("x2^2 + x1^4")), 16);
    REQUIRE(nf.psi.is_zero());
    REQUIRE(nf.psi_exactly_zero);
    REQUIRE(!nf.m.has_value());
    REQUIRE(nf.b0.poly() == parse_poly("x1^4"));
    REQUIRE(nf.n == 4);
}

TEST_CASE("normal form: sheared model solves the critical curve") {
    NormalFormData nf = normal_form(TruncatedSeries(parse_poly("x2^2 + (x1+x2^2)^4")), 16);
    REQUIRE(nf.n == 4);
    REQUIRE(nf.b0.poly().coeff(4, 0) == 1);
    // oracle: substitute psi back into d2 phi
    LatticePolynomial phi = parse_poly("x2^2 + (x1+x2^2)^4");
    TruncatedSeries res = subst(phi.derivative(2), TruncatedSeries::var1(), nf.psi, 14);
    for (const auto& [mm, c] : res.poly().terms()) REQUIRE(mm.total() > 14);
}

TEST_CASE("normal form: random samples reproduce psi and b0") {
    for (int trial = 0; trial < 25; ++trial) {
        int m = 2 + static_cast<int>(rng() % 2);
        int n = 3 + static_cast<int>(rng() % 5);
        NormalFormSample s = sample_a_type(n, static_cast<int>(rng() % 3) ? m : 0);
        NormalFormData nf = normal_form(TruncatedSeries(s.phi), 4 * n);
        REQUIRE(nf.n == s.n);
        if (s.m > 0) {
            REQUIRE(nf.m.has_value());
            REQUIRE(*nf.m == s.m);
        } else {
            REQUIRE(!nf.m.has_value());
        }
        REQUIRE(nf.psi.capped(3 * n).poly() == TruncatedSeries(s.psi).capped(3 * n).poly());
        REQUIRE(nf.b0.capped(3 * n).poly() == TruncatedSeries(s.b0).capped(3 * n).poly());
    }
}

TEST_CASE("normal form: rejections") {
    REQUIRE_THROWS_AS(normal_form(TruncatedSeries(parse_poly("x1^2")), 8), classify_error);
    REQUIRE_THROWS_AS(normal_form(TruncatedSeries(parse_poly("x1*x2 + x2^2 + x1^4")), 8), classify_error);
    REQUIRE_THROWS_AS(normal_form(TruncatedSeries(parse_poly("x2^2")), 8), classify_error);
    // b0 == x1^2: order 2 < 3
    REQUIRE_THROWS_AS(normal_form(TruncatedSeries(parse_poly("x2^2 + x1^2")), 8), classify_error);
}

TEST_CASE("class split on the boundary cases") {
    auto split = [](const char* text, int order) {
        TruncatedSeries phi(parse_poly(text));
        NormalFormData nf = normal_form(phi, order);
        return split_class(nf, phi);
    };
    REQUIRE(split("(x2 - x1^2)^2 + x1^5", 20) == SingularityClass::A_minus);
    REQUIRE(split("x2^2 + x1^4", 16) == SingularityClass::A_plus_generic);
    REQUIRE(split("(x2 - x1^2)^2 + x1^4", 16) == SingularityClass::A_minus);  // n = 2m boundary
}

TEST_CASE("effective data in the input coordinates") {
    SECTION("sheared binomial: kappa = (1/4, 1/8)") {
        EffectiveData eff = effective_data(TruncatedSeries(parse_poly("x2^2 + (x1+x2^2)^4")), 4);
        REQUIRE(eff.kappa_e.k1 == rat(1, 4));
        REQUIRE(eff.kappa_e.k2 == rat(1, 8));
        REQUIRE(eff.n_e_coords == rat(7, 2));
    }
    SECTION("already line-adapted: kappa = (1/4, 1/4)") {
        EffectiveData eff = effective_data(TruncatedSeries(parse_poly("(1 + x1^2)*x2^2 + x1^4")), 4);
        REQUIRE(eff.kappa_e.k1 == rat(1, 4));
        REQUIRE(eff.kappa_e.k2 == rat(1, 4));
        REQUIRE(eff.n_e_coords == 3);
        REQUIRE(eff.p == parse_poly("x1^2*x2^2 + x1^4"));
    }
    SECTION("vertical edge") {
        EffectiveData eff = effective_data(TruncatedSeries(parse_poly("x2^2 + x1^5")), 5);
        REQUIRE(eff.kappa_e.k2 == 0);
        REQUIRE(eff.n_e_coords == 5);
        REQUIRE(eff.p == parse_poly("x1^5"));
    }
}

TEST_CASE("line adaptation") {
    SECTION("recovers the hidden shear") {
        LineAdaptResult la = line_adapt(TruncatedSeries(parse_poly("x2^2 + (x1+x2^2)^4")), 16);
        REQUIRE(!la.already_adapted);
        REQUIRE(la.alpha.poly().coeff(0, 2) == -1);
        REQUIRE(la.n_e == 4);
    }
    SECTION("already line-adapted input returns alpha = 0") {
        LineAdaptResult la = line_adapt(TruncatedSeries(parse_poly("(1 + x1^2)*x2^2 + x1^4")), 16);
        REQUIRE(la.already_adapted);
        REQUIRE(la.n_e == 3);
    }
    SECTION("vertical edge fails condition (a)") {
        LineAdaptResult la = line_adapt(TruncatedSeries(parse_poly("x2^2 + x1^6")), 24);
        REQUIRE(la.already_adapted);
        REQUIRE(la.n_e == 6);
    }
    SECTION("fixed point: adapting the adapted coordinates is trivial") {
        LineAdaptResult la = line_adapt(TruncatedSeries(parse_poly("x2^2 + (x1+x2^2)^4")), 16);
        LineAdaptResult again = line_adapt(la.phi_la, 12);
        REQUIRE(again.already_adapted);
    }
}

TEST_CASE("exceptional-type detection") {
    SECTION("two monomials with no real root: not exceptional") {
        LatticePolynomial p = parse_poly("x1^4 + x1^2*x2^2");
        REQUIRE(!detect_Ae(p, Weight{rat(1, 4), rat(1, 4)}, 4));
    }
    SECTION("mixed linear term: exceptional via (A1)") {
        LatticePolynomial p = parse_poly("x1^4 + x1*x2^2");
        REQUIRE(detect_Ae(p, Weight{rat(1, 4), rat(3, 8)}, 4));
    }
    SECTION("maximal-order vanishing: exceptional via (A2) and the shift") {
        // p = (x1 - x2)^4 + x1 x2^3 is kappa-homogeneous for kappa = (1/4, 1/4)
        LatticePolynomial p = parse_poly("(x1 - x2)^4 + x1*x2^3");
        REQUIRE(detect_Ae(p, Weight{rat(1, 4), rat(1, 4)}, 4));
    }
    SECTION("vertical edge is never exceptional") {
        REQUIRE(!detect_Ae(parse_poly("x1^5"), Weight{rat(1, 5), Rational(0)}, 5));
    }
}

TEST_CASE("classification of the three spec models") {
    SECTION("A- model") {
        ClassificationReport rep = classify(parse_poly("(x2 - x1^2)^2 + x1^5"), 20);
        REQUIRE(rep.cls == SingularityClass::A_minus);
        REQUIRE(rep.n == 5);
        REQUIRE(*rep.m == 2);
        REQUIRE(rep.h == rat(10, 7));
        REQUIRE(rep.p_c_is_point());
        REQUIRE(rep.p_c_lower == rat(3, 2));
    }
    SECTION("A+ generic model") {
        ClassificationReport rep = classify(parse_poly("(1 + x1^2)*x2^2 + x1^4"), 16);
        REQUIRE(rep.cls == SingularityClass::A_plus_generic);
        REQUIRE(rep.n == 4);
        REQUIRE(rep.h == rat(4, 3));
        REQUIRE(*rep.n_e == 3);
        REQUIRE(*rep.p_e == rat(3, 2));
        REQUIRE(rep.p_c_lower == rat(3, 2));
        REQUIRE(rep.p_c_is_point());
    }
    SECTION("exceptional model at finite order") {
        // x2^2/(1-x1) + x1^5 truncated to total order 20
        LatticePolynomial geom;
        for (int k = 0; k <= 18; ++k) geom.add_term({k, 2}, Rational(1));
        geom.add_term({5, 0}, Rational(1));
        ClassificationReport rep = classify(TruncatedSeries(geom, 20), 20);
        REQUIRE(rep.cls == SingularityClass::A_e);
        REQUIRE(rep.n == 5);
        REQUIRE(*rep.n_e == 3);
        REQUIRE(*rep.p_e == rat(3, 2));
        REQUIRE(!rep.p_c_is_point());
        REQUIRE(rep.p_c_lower == rat(3, 2));
        REQUIRE(rep.p_c_upper == rat(5, 3));
    }
}

TEST_CASE("classify: shear invariance of the invariants") {
    const char* models[] = {"x2^2 + (x1+x2^2)^4", "(1 + x1^2)*x2^2 + x1^4", "x2^2 + x1^5",
                            "(x2 - x1^2)^2 + x1^5"};
    for (const char* text : models) {
        LatticePolynomial phi = parse_poly(text);
        ClassificationReport base = classify(phi, 24);
        for (int trial = 0; trial < 6; ++trial) {
            LatticePolynomial av;
            int ord = 1 + static_cast<int>(rng() % 3);
            av.add_term({0, ord}, small_rat());
            av.add_term({0, ord + 1}, small_rat());
            if (av.is_zero()) continue;
            TruncatedSeries sheared = shear_substitute(TruncatedSeries(phi), TruncatedSeries(av), 40);
            ClassificationReport rep = classify(sheared, 24);
            REQUIRE(rep.cls == base.cls);
            REQUIRE(rep.n == base.n);
            REQUIRE(rep.h == base.h);
            if (base.n_e) REQUIRE(*rep.n_e == *base.n_e);
            if (base.p_e) REQUIRE(*rep.p_e == *base.p_e);
            REQUIRE(rep.p_c_lower == base.p_c_lower);
            REQUIRE(rep.p_c_upper == base.p_c_upper);
        }
    }
}

TEST_CASE("classify: n_e is maximal over admissible shears") {
    const char* models[] = {"x2^2 + (x1+x2^2)^4", "(1 + x1^2)*x2^2 + x1^4", "x2^2 + x1^5"};
    for (const char* text : models) {
        LatticePolynomial phi = parse_poly(text);
        ClassificationReport base = classify(phi, 24);
        for (int trial = 0; trial < 50; ++trial) {
            LatticePolynomial av;
            int ord = 1 + static_cast<int>(rng() % 4);
            av.add_term({0, ord}, small_rat());
            if (rng() % 2) av.add_term({0, ord + 1 + static_cast<int>(rng() % 2)}, small_rat());
            if (av.is_zero()) continue;
            TruncatedSeries sheared = shear_substitute(TruncatedSeries(phi), TruncatedSeries(av), 40);
            EffectiveData eff = effective_data(sheared.capped(24), base.n, false);
            REQUIRE(eff.n_e_coords <= *base.n_e);
        }
    }
}

TEST_CASE("classify: bounds on the effective multiplicity") {
    const char* models[] = {"x2^2 + (x1+x2^2)^4", "(1 + x1^2)*x2^2 + x1^4", "x2^2 + x1^7",
                            "(1 + x1^3*x2)*x2^2 + x1^6"};
    for (const char* text : models) {
        ClassificationReport rep = classify(parse_poly(text), 28);
        REQUIRE(2 * (*rep.n_e) > rep.n);
        REQUIRE(*rep.n_e <= rep.n);
        if (rep.n >= 4) REQUIRE(*rep.p_e > rep.h);
    }
}

TEST_CASE("classify: n = 3 short-circuits to the settled exponent") {
    ClassificationReport rep = classify(parse_poly("x2^2 + x1^3"), 12);
    REQUIRE(rep.n == 3);
    REQUIRE(rep.p_c_is_point());
    REQUIRE(rep.p_c_lower == rat(3, 2));
}
