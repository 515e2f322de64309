#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "singscope/legendre.hpp"
#include "singscope/parse.hpp"
#include "singscope/resolve.hpp"

using namespace singscope;

namespace {

std::mt19937_64 rng(42424242);

/// Relative residual of Phi(r(s), s) at a small s.
double root_residual(const LatticePolynomial& phi, const PuiseuxSeries& r, double s) {
    std::complex<double> z = r.eval(s);
    std::complex<double> val = 0;
    double mass = 0;
    for (const auto& [m, c] : phi.terms()) {
        std::complex<double> t = to_double(c) * std::pow(z, m.e1) * std::pow(s, m.e2);
        val += t;
        mass += std::abs(t);
    }
    return mass == 0 ? 0.0 : std::abs(val) / mass;
}

struct FactorSpec {
    LatticePolynomial block;  // exact polynomial block
    Rational a;               // leading exponent of its roots
};

/// Random factor blocks with known cluster data: linear real roots, real or
/// imaginary fractional pairs, and integer-exponent complex pairs.
FactorSpec random_block() {
    FactorSpec f;
    int kind = static_cast<int>(rng() % 3);
    long k = 1 + static_cast<long>(rng() % 3);
    long c = 1 + static_cast<long>(rng() % 4);
    if (kind == 0) {
        long sign = (rng() % 2) ? 1 : -1;
        f.block = parse_poly("x1") - LatticePolynomial::term(rat(sign * c), 0, static_cast<int>(k));
        f.a = Rational(k);
    } else if (kind == 1) {
        long sign = (rng() % 2) ? 1 : -1;
        f.block = parse_poly("x1^2") - LatticePolynomial::term(rat(sign * c), 0, static_cast<int>(2 * k + 1));
        f.a = rat(2 * k + 1, 2);
    } else {
        long u = static_cast<long>(rng() % 5) - 2;
        long v = 1 + static_cast<long>(rng() % 3);
        f.block = parse_poly("x1^2") - LatticePolynomial::term(rat(2 * u), 1, static_cast<int>(k)) +
                  LatticePolynomial::term(rat(u * u + v * v), 0, static_cast<int>(2 * k));
        f.a = Rational(k);
    }
    return f;
}

}  // namespace

TEST_CASE("phase second derivative") {
    REQUIRE(phase_second_derivative(TruncatedSeries(parse_poly("x1^5 + x2*x1^2"))).poly() ==
            parse_poly("20*x1^3 + 2*x2"));
    REQUIRE(phase_second_derivative(TruncatedSeries(parse_poly("x1^4"))).poly() == parse_poly("12*x1^2"));
    REQUIRE(phase_second_derivative(TruncatedSeries(parse_poly("x1^4 + 1/4 x1^2*x2^2"))).poly() ==
            parse_poly("12*x1^2 + 1/2 x2^2"));
}

TEST_CASE("puiseux roots: square-root pair") {
    PuiseuxRootData data = puiseux_roots(TruncatedSeries(parse_poly("x1^2 - x2^3")), 6);
    REQUIRE(data.nu1 == 0);
    REQUIRE(data.roots.size() == 2);
    for (const auto& r : data.roots) {
        REQUIRE(r.multiplicity == 1);
        REQUIRE(r.series.ramification == 2);
        REQUIRE(r.series.terms.size() == 1);
        REQUIRE(r.series.terms[0].exponent == rat(3, 2));
        REQUIRE(std::abs(std::abs(r.series.terms[0].coeff) - 1.0) < 1e-12);
    }
}

TEST_CASE("puiseux roots: multiplicities from the exact square-free split") {
    // z^3 - 3 z s^2 + 2 s^3 = (z - s)^2 (z + 2s)
    PuiseuxRootData data = puiseux_roots(TruncatedSeries(parse_poly("x1^3 - 3*x1*x2^2 + 2*x2^3")), 6);
    REQUIRE(data.roots.size() == 2);
    bool saw_double = false, saw_single = false;
    for (const auto& r : data.roots) {
        REQUIRE(r.series.terms.size() == 1);
        REQUIRE(r.series.terms[0].exponent == 1);
        double c = r.series.terms[0].coeff.real();
        if (r.multiplicity == 2) {
            saw_double = true;
            REQUIRE(std::abs(c - 1.0) < 1e-12);
            REQUIRE(r.series.exact_tail);
        }
        if (r.multiplicity == 1) {
            saw_single = true;
            REQUIRE(std::abs(c + 2.0) < 1e-12);
        }
    }
    REQUIRE(saw_double);
    REQUIRE(saw_single);
}

TEST_CASE("puiseux roots: cube-root cluster with one real coefficient") {
    PuiseuxRootData data = puiseux_roots(TruncatedSeries(parse_poly("20*x1^3 + 2*x2")), 6);
    REQUIRE(data.roots.size() == 3);
    int real_count = 0;
    for (const auto& r : data.roots) {
        REQUIRE(r.multiplicity == 1);
        REQUIRE(r.series.terms[0].exponent == rat(1, 3));
        if (r.series.is_real()) {
            ++real_count;
            REQUIRE(std::abs(r.series.terms[0].coeff.real() - (-0.46415888336127786)) < 1e-9);
        }
    }
    REQUIRE(real_count == 1);
}

TEST_CASE("cluster tree on the model phases") {
    SECTION("cube-root cluster") {
        ClusterTree tree = cluster_tree(puiseux_roots(TruncatedSeries(parse_poly("20*x1^3 + 2*x2")), 6));
        REQUIRE(tree.clusters.size() == 1);
        REQUIRE(tree.clusters[0].leading_exponent == rat(1, 3));
        REQUIRE(tree.clusters[0].children.size() == 3);
        for (const auto& ch : tree.clusters[0].children) REQUIRE(ch.multiplicity == 1);
    }
    SECTION("square-root pair, both real") {
        ClusterTree tree = cluster_tree(puiseux_roots(TruncatedSeries(parse_poly("x1^2 - x2^3")), 6));
        REQUIRE(tree.clusters.size() == 1);
        REQUIRE(tree.clusters[0].leading_exponent == rat(3, 2));
        REQUIRE(tree.clusters[0].children.size() == 2);
        for (const auto& ch : tree.clusters[0].children) REQUIRE(ch.real);
    }
    SECTION("double and simple root") {
        ClusterTree tree = cluster_tree(puiseux_roots(TruncatedSeries(parse_poly("x1^3 - 3*x1*x2^2 + 2*x2^3")), 6));
        REQUIRE(tree.clusters.size() == 1);
        REQUIRE(tree.clusters[0].children.size() == 2);
        int n_at_1 = 0, n_at_m2 = 0;
        for (const auto& ch : tree.clusters[0].children) {
            if (std::abs(ch.c.real() - 1.0) < 1e-9) n_at_1 = ch.multiplicity;
            if (std::abs(ch.c.real() + 2.0) < 1e-9) n_at_m2 = ch.multiplicity;
        }
        REQUIRE(n_at_1 == 2);
        REQUIRE(n_at_m2 == 1);
    }
}

TEST_CASE("vertex data of the model clusters") {
    auto vertices = [](const char* text) {
        return vertex_data(cluster_tree(puiseux_roots(TruncatedSeries(parse_poly(text)), 6))).vertices;
    };
    REQUIRE(vertices("20*x1^3 + 2*x2") ==
            std::vector<PointQ>{{Rational(3), Rational(0)}, {Rational(0), Rational(1)}});
    REQUIRE(vertices("x1^3 - 3*x1*x2^2 + 2*x2^3") ==
            std::vector<PointQ>{{Rational(3), Rational(0)}, {Rational(0), Rational(3)}});
    REQUIRE(vertices("x1^2 - x2^3") == std::vector<PointQ>{{Rational(2), Rational(0)}, {Rational(0), Rational(3)}});
}

TEST_CASE("factored principal part of an edge") {
    SECTION("cube-root edge matches 20 z^3 + 2 s") {
        TruncatedSeries phi(parse_poly("20*x1^3 + 2*x2"));
        ClusterTree tree = cluster_tree(puiseux_roots(phi, 6));
        EdgePrincipalPart ep = principal_part_of_edge(phi, tree, 1);
        REQUIRE(ep.constant == 20.0);
        REQUIRE(ep.z_power == 0);
        REQUIRE(ep.s_power == 0);
        REQUIRE(ep.factors.size() == 3);
    }
    SECTION("imaginary pair") {
        TruncatedSeries phi(parse_poly("12*x1^2 + 1/2 x2^2"));
        ClusterTree tree = cluster_tree(puiseux_roots(phi, 6));
        EdgePrincipalPart ep = principal_part_of_edge(phi, tree, 1);
        REQUIRE(ep.constant == 12.0);
        REQUIRE(ep.factors.size() == 2);
    }
    SECTION("single vertex has no compact edge") {
        TruncatedSeries phi(parse_poly("x1^2"));
        ClusterTree tree = cluster_tree(puiseux_roots(phi, 6));
        REQUIRE(tree.clusters.empty());
        REQUIRE_THROWS_AS(principal_part_of_edge(phi, tree, 1), puiseux_error);
    }
}

TEST_CASE("polyhedron-cluster duality on random factored products") {
    int done = 0;
    while (done < 40) {
        LatticePolynomial phi = LatticePolynomial::constant(rat(1 + static_cast<long>(rng() % 3)));
        int blocks = 1 + static_cast<int>(rng() % 3);
        std::map<std::string, int> seen;
        bool ok = true;
        for (int b = 0; b < blocks; ++b) {
            FactorSpec f = random_block();
            std::string key = to_string(f.block);
            if (seen.count(key)) {
                ok = false;
                break;
            }
            seen[key] = 1;
            int mult = 1 + static_cast<int>(rng() % 2);
            for (int i = 0; i < mult; ++i) phi *= f.block;
        }
        if (!ok) continue;
        if (rng() % 3 == 0) phi *= LatticePolynomial::term(Rational(1), 1 + static_cast<int>(rng() % 2), 0);
        TruncatedSeries series(phi);
        PuiseuxRootData data;
        ClusterTree tree;
        try {
            data = puiseux_roots(series, 6);
            tree = cluster_tree(data);
        } catch (const puiseux_error&) {
            continue;  // coincidental coefficient collision between blocks
        }
        VertexData vd = vertex_data(tree);
        NewtonPolyhedron np = newton_polyhedron(phi);
        REQUIRE(vd.vertices == np.vertices);
        for (std::size_t i = 1; i < vd.slopes.size(); ++i) REQUIRE(vd.slopes[i - 1] < vd.slopes[i]);
        for (const auto& r : data.roots) REQUIRE(root_residual(phi, r.series, 1e-3) < 1e-9);
        ++done;
    }
}

TEST_CASE("resolution step: shift by the real cube root") {
    TruncatedSeries phi(parse_poly("20*x1^3 + 2*x2"));
    double c_real = -std::cbrt(0.1);
    ResolutionStep step = resolution_step(phi, rat(1, 3), c_real);
    REQUIRE(step.vertices == std::vector<PointQ>{{Rational(3), Rational(0)}, {Rational(1), rat(2, 3)}});
    REQUIRE(step.case_tag == CaseTag::case2_subcase_i);
    REQUIRE(step.followed_multiplicity == 1);
}

TEST_CASE("resolution step: shift by a non-root test point") {
    TruncatedSeries phi(parse_poly("20*x1^3 + 2*x2"));
    ResolutionStep step = resolution_step(phi, rat(1, 3), 1.0);
    REQUIRE(step.case_tag == CaseTag::case1_non_root);
    REQUIRE(step.vertices.back().b == 0);
    REQUIRE(step.vertices.back().a >= 1);
    REQUIRE(step.a1_ge_1);
}

TEST_CASE("resolution step: full collapse tags subcase (ii)") {
    TruncatedSeries phi(parse_poly("(x1 - x2)^2"));
    ResolutionStep step = resolution_step(phi, Rational(1), 1.0);
    REQUIRE(step.case_tag == CaseTag::case2_subcase_ii);
    REQUIRE(step.vertices == std::vector<PointQ>{{Rational(2), Rational(0)}});
    REQUIRE(step.polyhedron.edges.empty());
}

TEST_CASE("resolve: the A- model stops at step 1") {
    LegendreData leg = legendre_x2(parse_poly("(x2 - x1^2)^2 + x1^5"), 20);
    TruncatedSeries Phi = phase_second_derivative(leg.phi1);
    Resolution res = resolve(Phi);
    REQUIRE(res.stop_step == 1);
    REQUIRE(res.max_step_reached <= 20);
    bool found = false;
    for (const auto& s : res.steps)
        if (s.case_tag != CaseTag::case1_non_root) {
            REQUIRE(s.step_index == 1);
            REQUIRE(s.stopped);
            REQUIRE(s.followed_multiplicity == 1);
            REQUIRE(*s.chosen_exponent == rat(1, 3));
            found = true;
        }
    REQUIRE(found);
    REQUIRE(res.steps.front().first_edge_slope == rat(1, 3));  // a_1 = 1/(n-m)
}

TEST_CASE("resolve: double root stops at step 2 with multiplicity 2") {
    TruncatedSeries Phi(parse_poly("x1^3 - 3*x1*x2^2 + 2*x2^3"));
    Resolution res = resolve(Phi);
    REQUIRE(res.stop_step == 2);
    bool terminal = false;
    for (const auto& s : res.steps)
        if (s.step_index == 2 && s.case_tag == CaseTag::none) {
            REQUIRE(s.stopped);
            REQUIRE(s.followed_multiplicity == 2);
            terminal = true;
        }
    REQUIRE(terminal);
}

TEST_CASE("resolve: no nontrivial roots means immediate stop") {
    Resolution res = resolve(TruncatedSeries(parse_poly("12*x1^2")));
    REQUIRE(res.steps.empty());
    REQUIRE(res.stop_step == 0);
}

TEST_CASE("resolve: deeper splitting terminates with non-increasing multiplicity") {
    // ((z - s)^2 - s^4)(z + 2s): the two roots s +- s^2 split at the second level
    LatticePolynomial phi = (parse_poly("(x1 - x2)^2") - parse_poly("x2^4")) * parse_poly("x1 + 2*x2");
    Resolution res = resolve(TruncatedSeries(phi));
    REQUIRE(res.stop_step == 2);
    REQUIRE(res.max_step_reached <= 20);
    std::map<int, int> mult_by_branch;
    for (const auto& s : res.steps) {
        if (s.case_tag == CaseTag::case1_non_root) continue;
        if (mult_by_branch.count(s.branch_id)) REQUIRE(s.followed_multiplicity <= mult_by_branch[s.branch_id]);
        if (s.followed_multiplicity > 0) mult_by_branch[s.branch_id] = s.followed_multiplicity;
    }
}

TEST_CASE("resolve: A+ step-1 slope law") {
    LegendreData leg = legendre_x2(parse_poly("(1 + x1^2)*x2^2 + x1^4"), 16);
    TruncatedSeries Phi = phase_second_derivative(leg.phi1);
    Resolution res = resolve(Phi);
    // n = 4, n_e = 3: a_1 = 1/(n - n_e) = 1; the cluster is complex, Case 1 only
    REQUIRE(!res.tree.clusters.empty());
    REQUIRE(res.tree.clusters.front().leading_exponent == 1);
    for (const auto& s : res.steps) REQUIRE(s.case_tag == CaseTag::case1_non_root);
}

TEST_CASE("multiplicity lemma classification") {
    SECTION("full collapse") {
        LatticePolynomial P = parse_poly("(x1 - x2)^3");
        MultiplicityReport rep = multiplicity_lemma_classify(P, Weight{rat(1, 3), rat(1, 3)});
        REQUIRE(rep.form == MultiplicityForm::full_collapse_form);
        REQUIRE(rep.n_e_minus_2 == 2);
    }
    SECTION("fractional pair with simple real roots") {
        LatticePolynomial P = parse_poly("x1*(x1^2 - x2^3)");
        MultiplicityReport rep = multiplicity_lemma_classify(P, Weight{rat(1, 3), rat(2, 9)});
        REQUIRE(rep.form == MultiplicityForm::simple_real_roots_form);
        REQUIRE(rep.q == 2);
        REQUIRE(rep.max_real_multiplicity == 1);
    }
    SECTION("no real root at all") {
        LatticePolynomial P = parse_poly("12*x1^2 + 2*x2^2");
        MultiplicityReport rep = multiplicity_lemma_classify(P, Weight{rat(1, 2), rat(1, 2)});
        REQUIRE(rep.form == MultiplicityForm::no_high_mult_real_root);
    }
    SECTION("rejects inhomogeneous input") {
        REQUIRE_THROWS_AS(multiplicity_lemma_classify(parse_poly("x1^3 + x2^2"), Weight{rat(1, 3), rat(1, 3)}),
                          puiseux_error);
    }
}

TEST_CASE("transition-domain reconstruction identity") {
    for (int trial = 0; trial < 20; ++trial) {
        int B = static_cast<int>(rng() % 4);
        std::map<int, Rational> v;
        for (int k = -B; k <= 3; ++k)
            if (rng() % 2) v[k] = rat(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 3));
        auto u = integrate_profile_twice(v, B);
        for (const auto& [k, rho] : v) {
            Rational lhs = u.at(k) * (B + k + 2) * (B + k + 1);
            REQUIRE(lhs == rho);
        }
    }
}

TEST_CASE("transition factorization check on the golden phases") {
    TruncatedSeries phi(parse_poly("20*x1^3 + 2*x2"));
    SECTION("outer domain: the z^3 vertex dominates") {
        TransitionCheck chk = transition_factorization_check(phi, 0, 8, 64, 7);
        REQUIRE(chk.pass);
        REQUIRE(chk.raw_min > 20.0 * 0.9);
        REQUIRE(chk.raw_max < 20.0 * 1.1);
    }
    SECTION("inner domain: the s vertex dominates") {
        TransitionCheck chk = transition_factorization_check(phi, 1, 8, 64, 7);
        REQUIRE(chk.pass);
        REQUIRE(chk.raw_min > 2.0 * 0.9);
        REQUIRE(chk.raw_max < 2.0 * 1.1);
    }
    SECTION("pure power is exactly homogeneous") {
        TransitionCheck chk = transition_factorization_check(TruncatedSeries(parse_poly("x1^2")), 0, 8, 32, 7);
        REQUIRE(chk.pass);
        REQUIRE(std::abs(chk.raw_min - 1.0) < 1e-9);
        REQUIRE(std::abs(chk.raw_max - 1.0) < 1e-9);
    }
}
