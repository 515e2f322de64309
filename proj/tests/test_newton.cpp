#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "singscope/newton.hpp"
#include "singscope/parse.hpp"

using namespace singscope;

namespace {

std::mt19937_64 rng(977123);

std::vector<PointQ> random_support(int max_pts, int max_coord) {
    int k = 1 + static_cast<int>(rng() % max_pts);
    std::vector<PointQ> pts;
    for (int i = 0; i < k; ++i)
        pts.push_back({Rational(static_cast<long>(rng() % (max_coord + 1))),
                       Rational(static_cast<long>(rng() % (max_coord + 1)))});
    return pts;
}

/// Oracle: walk the bisectrix by bisection until it crosses the staircase
/// membership predicate.
Rational bisectrix_crossing(const NewtonPolyhedron& np) {
    auto inside = [&](const Rational& t) {
        PointQ p{t, t};
        return np.supports(p);
    };
    Rational lo = 0, hi = 64;
    REQUIRE(inside(hi));
    for (int i = 0; i < 300; ++i) {
        Rational mid = (lo + hi) / 2;
        if (inside(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

TEST_CASE("hull: two-point staircase") {
    NewtonPolyhedron np = newton_polyhedron({{Rational(0), Rational(2)}, {Rational(5), Rational(0)}});
    REQUIRE(np.vertices.size() == 2);
    REQUIRE(np.vertices[0] == PointQ{Rational(5), Rational(0)});
    REQUIRE(np.vertices[1] == PointQ{Rational(0), Rational(2)});
    REQUIRE(np.edges.size() == 1);
    REQUIRE(np.edges[0].kappa.k1 == rat(1, 5));
    REQUIRE(np.edges[0].kappa.k2 == rat(1, 2));
}

TEST_CASE("hull: point on the edge is not a vertex") {
    NewtonPolyhedron np = newton_polyhedron(
        {{Rational(3), Rational(0)}, {Rational(1), Rational(2)}, {Rational(0), Rational(3)}});
    REQUIRE(np.vertices.size() == 2);
    REQUIRE(np.vertices[0] == PointQ{Rational(3), Rational(0)});
    REQUIRE(np.vertices[1] == PointQ{Rational(0), Rational(3)});
    // half-plane oracle: (1,2) lies exactly on the edge line t1 + t2 = 3
    REQUIRE(np.edges[0].kappa.degree_of(PointQ{Rational(1), Rational(2)}) == 1);
}

TEST_CASE("hull: support of the first resolved phase") {
    NewtonPolyhedron np = newton_polyhedron(parse_poly("20*x1^3 + 2*x2"));
    REQUIRE(np.vertices.size() == 2);
    REQUIRE(np.vertices[0] == PointQ{Rational(3), Rational(0)});
    REQUIRE(np.vertices[1] == PointQ{Rational(0), Rational(1)});
    REQUIRE(np.edges[0].slope() == Slope::finite(rat(1, 3)));
}

TEST_CASE("newton distance on the model cases") {
    REQUIRE(newton_distance(newton_polyhedron(parse_poly("x2^2 + x1^5"))) == rat(10, 7));
    REQUIRE(newton_distance(newton_polyhedron(parse_poly("x2^2 + x1^4"))) == rat(4, 3));
    REQUIRE(newton_distance(newton_polyhedron({{Rational(1), Rational(1)}})) == 1);
}

TEST_CASE("principal part selects the minimal kappa-degree terms") {
    LatticePolynomial red = parse_poly("x1^2*x2^2 + x1^4");
    LatticePolynomial pp = principal_part(red, Weight{rat(1, 4), rat(1, 4)});
    REQUIRE(pp == red);  // both terms on the edge (kappa-degree 1 each)

    LatticePolynomial leg = parse_poly("x1^5 + x2*x1^2");
    REQUIRE(principal_part(leg, Weight{rat(1, 5), rat(3, 5)}) == leg);

    LatticePolynomial q = parse_poly("x1^3 + x1*x2 + x2^4");
    REQUIRE(principal_part(q, Weight{rat(1, 3), rat(2, 3)}) == parse_poly("x1^3 + x1*x2"));
    REQUIRE_THROWS_AS(principal_part(LatticePolynomial(), Weight{rat(1, 2), rat(1, 2)}), newton_error);
}

TEST_CASE("n_kappa agrees between its two formulas") {
    REQUIRE(n_kappa(Weight{rat(1, 5), rat(3, 5)}, PointQ{Rational(2), Rational(1)}) == 4);
    int n = 6;
    REQUIRE(n_kappa(Weight{rat(1, n), rat(1, 2)}, PointQ{Rational(n), Rational(0)}) == Rational(n) / 2 + 2);
    REQUIRE(n_kappa(Weight{rat(1, 7), rat(2, 7)}, PointQ{Rational(5), Rational(1)}) == 7);  // A = 1: B + 2
    REQUIRE_THROWS_AS(n_kappa(Weight{rat(1, 4), Rational(0)}, PointQ{Rational(4), Rational(2)}), newton_error);
}

TEST_CASE("key inequality along edges") {
    // Phi of (x2 - x1^2)^2 + x1^5: single edge (3,0)-(0,1), n_kappa = 2 = m
    NewtonPolyhedron np1 = newton_polyhedron(parse_poly("20*x1^3 + 2*x2"));
    auto rep1 = key_inequality_holds(np1);
    REQUIRE(rep1.holds);
    REQUIRE(rep1.n_values == std::vector<Rational>{Rational(2)});

    NewtonPolyhedron np2 = newton_polyhedron(
        {{Rational(4), Rational(0)}, {Rational(2), Rational(1)}, {Rational(0), Rational(4)}});
    auto rep2 = key_inequality_holds(np2);
    REQUIRE(rep2.holds);
    REQUIRE(rep2.n_values == std::vector<Rational>{Rational(4), Rational(4)});

    NewtonPolyhedron np3 = newton_polyhedron({{Rational(4), Rational(0)}, {Rational(1), Rational(1) / 2}});
    REQUIRE_THROWS_AS(key_inequality_holds(np3), newton_error);
}

TEST_CASE("random supports: every point is on or above every supporting line") {
    for (int trial = 0; trial < 60; ++trial) {
        auto pts = random_support(20, 30);
        NewtonPolyhedron np = newton_polyhedron(pts);
        for (const auto& p : pts) {
            REQUIRE(np.supports(p));
            for (const auto& e : np.edges) REQUIRE(e.kappa.degree_of(p) >= 1);
        }
        // slopes strictly increase
        for (std::size_t l = 1; l < np.edges.size(); ++l) REQUIRE(np.edges[l - 1].slope() < np.edges[l].slope());
    }
}

TEST_CASE("vertex minimality: removing a reported vertex changes the hull") {
    for (int trial = 0; trial < 40; ++trial) {
        auto pts = random_support(15, 20);
        NewtonPolyhedron np = newton_polyhedron(pts);
        if (np.vertices.size() < 2) continue;
        for (const auto& v : np.vertices) {
            std::vector<PointQ> rest;
            for (const auto& p : pts)
                if (!(p == v)) rest.push_back(p);
            if (rest.empty()) continue;
            NewtonPolyhedron reduced = newton_polyhedron(rest);
            REQUIRE(!(reduced.vertices == np.vertices));
        }
    }
}

TEST_CASE("newton distance equals the bisectrix crossing") {
    for (int trial = 0; trial < 30; ++trial) {
        auto pts = random_support(12, 14);
        NewtonPolyhedron np = newton_polyhedron(pts);
        Rational d = newton_distance(np);
        Rational crossing = bisectrix_crossing(np);
        // the bisection brackets d within 64 * 2^-300
        Rational err = abs(crossing - d);
        REQUIRE(err < Rational(1) / Rational("1000000000000000000000000"));
    }
}
