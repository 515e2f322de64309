#pragma once

#include <optional>
#include <random>

#include "puiseux.hpp"

namespace singscope {

enum class CaseTag { none, case1_non_root, case2_subcase_i, case2_subcase_ii };

inline std::string to_string(CaseTag t) {
    switch (t) {
        case CaseTag::case1_non_root: return "Case1_c_not_real_root";
        case CaseTag::case2_subcase_i: return "Case2_subcase_i";
        case CaseTag::case2_subcase_ii: return "Case2_subcase_ii";
        default: return "none";
    }
}

enum class MultiplicityForm { no_high_mult_real_root, full_collapse_form, simple_real_roots_form };

inline std::string to_string(MultiplicityForm f) {
    switch (f) {
        case MultiplicityForm::no_high_mult_real_root: return "no_high_mult_real_root";
        case MultiplicityForm::full_collapse_form: return "full_collapse_form";
        default: return "simple_real_roots_form";
    }
}

enum class MultLemmaRouting { not_required, simple_real_roots, violation };

// ---------------------------------------------------------------------------
// Relative root structure (diffs against the accumulated jet)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<PuiseuxTerm> series_difference(const std::vector<PuiseuxTerm>& r, const std::vector<PuiseuxTerm>& jet) {
    std::vector<PuiseuxTerm> out;
    std::size_t i = 0, j = 0;
    while (i < r.size() || j < jet.size()) {
        if (j >= jet.size() || (i < r.size() && r[i].exponent < jet[j].exponent)) {
            out.push_back(r[i]);
            ++i;
        } else if (i >= r.size() || jet[j].exponent < r[i].exponent) {
            out.push_back({jet[j].exponent, -jet[j].coeff});
            ++j;
        } else {
            std::complex<double> d = r[i].coeff - jet[j].coeff;
            if (std::abs(d) > 1e-9 * (std::abs(r[i].coeff) + std::abs(jet[j].coeff))) out.push_back({r[i].exponent, d});
            ++i;
            ++j;
        }
    }
    return out;
}

/// All roots of the phase re-expressed relative to the jet, bundled as a
/// cluster tree (the trivial slot counts the roots identical to the jet).
inline ClusterTree relative_tree(const std::vector<RootBranch>& all, const std::vector<PuiseuxTerm>& jet) {
    ClusterTree tree;
    std::vector<RootBranch> diffs;
    for (const auto& r : all) {
        auto d = series_difference(r.series.terms, jet);
        tree.n_all += r.multiplicity;
        if (d.empty()) {
            tree.nu1 += r.multiplicity;
            if (!r.series.exact_tail) tree.fully_separated = false;
            continue;
        }
        RootBranch rel = r;
        rel.series.terms = std::move(d);
        diffs.push_back(std::move(rel));
    }
    tree.clusters = build_clusters(diffs, 0, tree.fully_separated);
    return tree;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Resolution steps
// ---------------------------------------------------------------------------

struct ResolutionStep {
    int branch_id = 0;
    int step_index = 1;
    std::vector<PuiseuxTerm> jet;       // real jet subtracted so far
    std::vector<PointQ> vertices;       // (B_l, A_l) of the current phase
    std::vector<Rational> slopes;       // a_l between consecutive vertices
    NewtonPolyhedron polyhedron;        // same data as a polyhedron object
    std::optional<Rational> chosen_exponent;
    std::optional<double> chosen_coefficient;
    CaseTag case_tag = CaseTag::none;
    bool a1_ge_1 = true;
    MultLemmaRouting mult_routing = MultLemmaRouting::not_required;
    bool stopped = false;
    int followed_multiplicity = 0;
    Rational first_edge_slope = 0;
};

struct ResolveParams {
    int depth = 6;
    int max_steps = 20;
};

struct Resolution {
    PuiseuxRootData roots;
    ClusterTree tree;  // absolute cluster tree of the input phase
    std::vector<ResolutionStep> steps;
    int max_step_reached = 0;  // includes Case-1 transition records
    int stop_step = 0;         // deepest root-following (Case-2) step
    bool fully_separated = true;
};

class resolve_error : public puiseux_error {
  public:
    explicit resolve_error(const std::string& what) : puiseux_error(what) {}
};

namespace detail {

inline std::vector<RootBranch> with_trivial_roots(const PuiseuxRootData& data) {
    std::vector<RootBranch> all = data.roots;
    if (data.nu1 > 0) {
        RootBranch trivial;
        trivial.series.exact_tail = true;
        trivial.multiplicity = data.nu1;
        all.push_back(trivial);
    }
    return all;
}

inline NewtonPolyhedron polyhedron_from_vertices(const VertexData& vd) {
    return newton_polyhedron(vd.vertices);
}

/// A1 >= 1 check plus the multiplicity-lemma routing for the first edge.
inline void record_first_edge_checks(ResolutionStep& step, const ClusterTree& rel) {
    if (step.polyhedron.edges.empty()) {
        step.a1_ge_1 = true;
        step.first_edge_slope = 0;
        return;
    }
    step.first_edge_slope = step.polyhedron.edges[0].slope().value;
    step.a1_ge_1 = step.polyhedron.vertices[1].a >= 1;
    if (step.a1_ge_1) return;
    // A1 < 1 is admissible only when every real root of the first cluster is
    // simple (the multiplicity lemma's simple-root branch).
    bool simple = true;
    if (!rel.clusters.empty())
        for (const auto& ch : rel.clusters.front().children)
            if (ch.real)
                for (const auto& r : ch.roots)
                    if (r.multiplicity > 1) simple = false;
    step.mult_routing = simple ? MultLemmaRouting::simple_real_roots : MultLemmaRouting::violation;
}

struct BranchWalker {
    const std::vector<RootBranch>& all;
    ResolveParams params;
    std::vector<ResolutionStep>& steps;
    int& max_step;
    bool cross_check = true;
    int branch_counter = 0;

    /// Records the state reached with `jet` at step `p` together with the
    /// branch decision `(a, c)` and recurses when the branch continues.
    void walk(const std::vector<PuiseuxTerm>& jet, const PhasePolynomial& phase, int p, int branch_id) {
        if (p > params.max_steps) throw resolve_error("resolution exceeded max_steps before stabilizing");
        max_step = std::max(max_step, p);
        ClusterTree rel = relative_tree(all, jet);
        VertexData vd = vertex_data(rel);
        NewtonPolyhedron np = polyhedron_from_vertices(vd);
        // cross-check against the support of the substituted polynomial: the
        // support hull must coincide with the root-derived vertex list
        if (cross_check && !phase.is_zero()) {
            NewtonPolyhedron np2 = newton_polyhedron(phase.support());
            if (!(np2.vertices == np.vertices))
                throw resolve_error("vertex data and substituted-phase support disagree");
        }

        Rational a_prev = jet.empty() ? Rational(0) : jet.back().exponent;
        bool branched = false;
        for (const auto& cl : rel.clusters) {
            if (!(cl.leading_exponent > a_prev)) continue;  // outside the followed domain
            int b_l = 0;  // roots strictly above this cluster's exponent
            b_l += rel.nu1;
            for (const auto& other : rel.clusters)
                if (other.leading_exponent > cl.leading_exponent)
                    for (const auto& ch : other.children) b_l += ch.multiplicity;
            for (const auto& ch : cl.children) {
                if (!ch.real) continue;
                branched = true;
                ResolutionStep step;
                step.branch_id = branch_counter++;
                step.step_index = p;
                step.jet = jet;
                step.vertices = vd.vertices;
                step.slopes = vd.slopes;
                step.polyhedron = np;
                step.chosen_exponent = cl.leading_exponent;
                step.chosen_coefficient = ch.c.real();
                step.case_tag = (b_l == 0 && cl.children.size() == 1) ? CaseTag::case2_subcase_ii
                                                                      : CaseTag::case2_subcase_i;
                step.followed_multiplicity = ch.multiplicity;
                record_first_edge_checks(step, rel);
                if (ch.multiplicity == 1) {
                    // single simple real root: the resolution stops here
                    step.stopped = true;
                    steps.push_back(step);
                    continue;
                }
                if (ch.distinct_roots == 1) {
                    // one real root with multiplicity: subtract its full known
                    // jet and record the resolved state
                    steps.push_back(step);
                    const PuiseuxSeries& root = ch.roots.front().series;
                    std::vector<PuiseuxTerm> njet = jet;
                    PhasePolynomial nphase = phase;
                    for (const auto& t : root.terms)
                        if (t.exponent > a_prev) {
                            njet.push_back({t.exponent, t.coeff.real()});
                            nphase = nphase.shifted(t.coeff.real(), t.exponent);
                        }
                    record_terminal(njet, nphase, p + 1, step.branch_id, ch.multiplicity);
                    continue;
                }
                // genuine splitting: shift by the leading term and continue
                steps.push_back(step);
                std::vector<PuiseuxTerm> njet = jet;
                njet.push_back({cl.leading_exponent, ch.c.real()});
                walk(njet, phase.shifted(ch.c.real(), cl.leading_exponent), p + 1, step.branch_id);
            }
            // Case 1: one representative non-root test point per cluster
            {
                double cmax = 1.0;
                for (const auto& ch : cl.children) cmax = std::max(cmax, std::abs(ch.c) + 1.0);
                std::vector<PuiseuxTerm> njet = jet;
                njet.push_back({cl.leading_exponent, cmax});
                ClusterTree rel2 = relative_tree(all, njet);
                VertexData vd2 = vertex_data(rel2);
                ResolutionStep step;
                step.branch_id = branch_counter++;
                step.step_index = p + 1;
                max_step = std::max(max_step, p + 1);
                step.jet = njet;
                step.vertices = vd2.vertices;
                step.slopes = vd2.slopes;
                step.polyhedron = polyhedron_from_vertices(vd2);
                step.chosen_exponent = cl.leading_exponent;
                step.chosen_coefficient = cmax;
                step.case_tag = CaseTag::case1_non_root;
                step.stopped = true;
                record_first_edge_checks(step, rel2);
                steps.push_back(step);
            }
        }
        (void)branched;
    }

    void record_terminal(const std::vector<PuiseuxTerm>& jet, const PhasePolynomial& phase, int p, int branch_id,
                         int multiplicity) {
        max_step = std::max(max_step, p);
        ClusterTree rel = relative_tree(all, jet);
        VertexData vd = vertex_data(rel);
        ResolutionStep step;
        step.branch_id = branch_id;
        step.step_index = p;
        step.jet = jet;
        step.vertices = vd.vertices;
        step.slopes = vd.slopes;
        step.polyhedron = polyhedron_from_vertices(vd);
        step.stopped = true;
        step.followed_multiplicity = multiplicity;
        record_first_edge_checks(step, rel);
        if (cross_check && !phase.is_zero()) {
            NewtonPolyhedron np2 = newton_polyhedron(phase.support());
            if (!(np2.vertices == step.polyhedron.vertices))
                throw resolve_error("vertex data and substituted-phase support disagree at a terminal step");
        }
        steps.push_back(step);
    }
};

}  // namespace detail

/// One explicit resolution step from the initial phase: shift z -> z + c s^a
/// and report the new polyhedron, case tag, and the A1 >= 1 check.
inline ResolutionStep resolution_step(const TruncatedSeries& Phi, const Rational& a, double c, int depth = 6) {
    PuiseuxRootData data = puiseux_roots(Phi, depth);
    std::vector<RootBranch> all = detail::with_trivial_roots(data);
    std::vector<PuiseuxTerm> jet{{a, c}};
    ClusterTree rel = detail::relative_tree(all, jet);
    VertexData vd = vertex_data(rel);
    ResolutionStep step;
    step.step_index = 2;
    step.jet = jet;
    step.vertices = vd.vertices;
    step.slopes = vd.slopes;
    step.polyhedron = detail::polyhedron_from_vertices(vd);
    step.chosen_exponent = a;
    step.chosen_coefficient = c;
    detail::record_first_edge_checks(step, rel);
    // case tag, read off the absolute cluster structure
    ClusterTree abs = cluster_tree(data);
    step.case_tag = CaseTag::case1_non_root;
    for (const auto& cl : abs.clusters) {
        if (cl.leading_exponent != a) continue;
        int above = abs.nu1;
        for (const auto& other : abs.clusters)
            if (other.leading_exponent > a)
                for (const auto& ch : other.children) above += ch.multiplicity;
        for (const auto& ch : cl.children)
            if (ch.real && std::abs(ch.c.real() - c) <= 1e-7 * std::max(1.0, std::abs(c))) {
                step.case_tag = (above == 0 && cl.children.size() == 1) ? CaseTag::case2_subcase_ii
                                                                        : CaseTag::case2_subcase_i;
                step.followed_multiplicity = ch.multiplicity;
            }
    }
    PhasePolynomial shifted = PhasePolynomial::from_series(Phi).shifted(c, a);
    NewtonPolyhedron np2 = newton_polyhedron(shifted.support());
    if (!(np2.vertices == step.polyhedron.vertices))
        throw resolve_error("vertex data and substituted-phase support disagree");
    return step;
}

/// Full resolution: depth-first over all real leading coefficients, one
/// Case-1 representative per cluster, stopping per branch when the followed
/// sub-cluster holds a single real root (with multiplicity).
inline Resolution resolve(const TruncatedSeries& Phi, const ResolveParams& params = {}) {
    Resolution res;
    res.roots = puiseux_roots(Phi, params.depth);
    res.tree = cluster_tree(res.roots);
    res.fully_separated = res.tree.fully_separated;
    if (res.roots.roots.empty()) return res;  // no nontrivial roots: immediate stop
    std::vector<RootBranch> all = detail::with_trivial_roots(res.roots);
    bool exact_route = res.roots.far_roots == 0 && res.roots.nu2 == 0;
    detail::BranchWalker walker{all, params, res.steps, res.max_step_reached, exact_route};
    walker.walk({}, PhasePolynomial::from_series(Phi), 1, 0);
    for (const auto& s : res.steps)
        if (s.case_tag != CaseTag::case1_non_root) res.stop_step = std::max(res.stop_step, s.step_index);
    return res;
}

// ---------------------------------------------------------------------------
// Multiplicity lemma (exact)
// ---------------------------------------------------------------------------

struct MultiplicityReport {
    MultiplicityForm form = MultiplicityForm::no_high_mult_real_root;
    Rational n_e_minus_2;
    long q = 1;
    long p = 1;
    int nu1 = 0;
    int max_real_multiplicity = 0;
};

/// Classifies a kappa-homogeneous P of kappa-degree 1 with P(y1,0) ~ y1^{n-2}
/// by the root structure of its edge polynomial: either the full-collapse
/// shape (y1 - c y2^p)^{n-2}, or every non-trivial real root is simple, or no
/// real root exceeds multiplicity n_e - 2. All decisions are exact
/// (square-free decomposition plus Sturm counts over Q).
inline MultiplicityReport multiplicity_lemma_classify(const LatticePolynomial& P, const Weight& kappa) {
    if (P.is_zero()) throw puiseux_error("multiplicity lemma: zero polynomial");
    if (!(kappa.k2 > 0) || kappa.k2 > 1) throw puiseux_error("multiplicity lemma: need 0 < kappa_2 <= 1");
    for (const auto& [m, c] : P.terms())
        if (kappa.degree_of(m) != 1) throw puiseux_error("multiplicity lemma: P is not kappa-homogeneous of degree 1");
    int n2 = P.degree1();
    if (P.coeff(n2, 0) == 0) throw puiseux_error("multiplicity lemma: P(y1, 0) must be a multiple of y1^{n-2}");

    MultiplicityReport rep;
    Rational a = kappa.k1 / kappa.k2;
    rep.p = to_long(Rational(a.get_num()));
    rep.q = to_long(Rational(a.get_den()));
    int nu1 = n2;
    for (const auto& [m, c] : P.terms()) nu1 = std::min(nu1, m.e1);
    rep.nu1 = nu1;
    rep.n_e_minus_2 = (1 - kappa.k2) / kappa.k1;

    UPoly edge;
    for (const auto& [m, c] : P.terms()) {
        long i = m.e1 - nu1;
        if (i % rep.q != 0) throw puiseux_error("multiplicity lemma: support off the q-lattice");
        long idx = i / rep.q;
        if (static_cast<std::size_t>(idx) >= edge.size()) edge.resize(idx + 1, Rational(0));
        edge[idx] += c;
    }
    unormalize(edge);

    bool any_real = false;
    for (const auto& [factor, mult] : usquarefree(edge)) {
        int qualifying = (rep.q % 2 == 1) ? ucount_real_roots(factor) : ucount_positive_roots(factor);
        if (qualifying > 0) {
            any_real = true;
            rep.max_real_multiplicity = std::max(rep.max_real_multiplicity, mult);
        }
    }

    if (nu1 == 0 && rep.q == 1) {
        if (auto c = uis_power_of_linear(edge, n2); c.has_value()) {
            rep.form = MultiplicityForm::full_collapse_form;
            return rep;
        }
    }
    if (any_real && rep.max_real_multiplicity == 1) {
        rep.form = MultiplicityForm::simple_real_roots_form;
        return rep;
    }
    // lemma guarantee: anything else cannot carry a real root of multiplicity
    // beyond n_e - 2
    if (Rational(rep.max_real_multiplicity) > rep.n_e_minus_2)
        throw puiseux_error("multiplicity lemma violated: real root of multiplicity " +
                            std::to_string(rep.max_real_multiplicity) + " > n_e - 2");
    rep.form = MultiplicityForm::no_high_mult_real_root;
    return rep;
}

// ---------------------------------------------------------------------------
// Transition-domain factorization check (numeric)
// ---------------------------------------------------------------------------

struct TransitionCheck {
    double raw_min = 0, raw_max = 0;    // |Phi| / (s^A |z|^B)
    double norm_min = 0, norm_max = 0;  // raw divided by the vertex coefficient
    bool pass = false;
    int samples = 0;
};

/// Samples the transition domain E_l between consecutive homogeneous domains
/// and checks |Phi(z, s)| ~ |c_vertex| s^{A_l} |z|^{B_l} within a factor C.
inline TransitionCheck transition_factorization_check(const TruncatedSeries& Phi, int l, int M = 8, int samples = 64,
                                                      std::uint64_t seed = 1, double C = 4.0) {
    PuiseuxRootData data = puiseux_roots(Phi, 6);
    ClusterTree tree = cluster_tree(data);
    VertexData vd = vertex_data(tree);
    int L = static_cast<int>(vd.slopes.size());
    if (l < 0 || l > L) throw puiseux_error("transition check: no such domain");
    const PointQ& v = vd.vertices[l];
    double A = to_double(v.a), B = to_double(v.b);
    if (!is_integer(v.b) || !is_integer(v.a)) throw puiseux_error("transition check: vertex is not a lattice point");
    Rational cvert_q = Phi.poly().coeff(static_cast<int>(to_long(v.b)), static_cast<int>(to_long(v.a)));
    if (cvert_q == 0) throw puiseux_error("transition check: vertex coefficient vanished");
    double cvert = std::abs(to_double(cvert_q));

    double s_hi = 1e-2, s_lo;
    double two_M = std::pow(2.0, M);
    if (l >= 1 && l < L) {
        // need 2^M s^{a_{l+1}} < 2^{-M} s^{a_l}
        double gap = to_double(vd.slopes[l] - vd.slopes[l - 1]);
        s_hi = std::min(s_hi, std::pow(2.0, -2.0 * M / gap) / 4.0);
    } else if (l == 0 && L > 0) {
        // need 2^M s^{a_1} < z_max = 1/4
        s_hi = std::min(s_hi, std::pow(2.0, (-2.0 - M) / to_double(vd.slopes[0])));
    }
    s_lo = s_hi * std::pow(2.0, -10);
    if (!(s_hi > 1e-300) || !(s_lo > 1e-300)) throw puiseux_error("transition check: empty sampled domain");

    std::mt19937_64 rng(seed);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    TransitionCheck out;
    out.raw_min = out.norm_min = 1e300;
    for (int i = 0; i < samples; ++i) {
        double s = s_lo * std::pow(s_hi / s_lo, uniform());
        double z_lo, z_hi;
        if (L == 0) {
            z_lo = 1e-6;
            z_hi = 0.25;
        } else if (l == 0) {
            z_lo = two_M * std::pow(s, to_double(vd.slopes[0]));
            z_hi = 0.25;
        } else if (l == L) {
            z_hi = std::pow(s, to_double(vd.slopes[L - 1])) / two_M;
            z_lo = z_hi * 1e-3;
        } else {
            z_lo = two_M * std::pow(s, to_double(vd.slopes[l]));
            z_hi = std::pow(s, to_double(vd.slopes[l - 1])) / two_M;
        }
        if (!(z_lo < z_hi)) throw puiseux_error("transition check: empty sampled domain");
        double z = z_lo * std::pow(z_hi / z_lo, uniform());
        if (rng() & 1) z = -z;
        double denom = std::pow(s, A) * std::pow(std::abs(z), B);
        double val = std::abs(Phi.poly().eval<double>(z, s)) / denom;
        out.raw_min = std::min(out.raw_min, val);
        out.raw_max = std::max(out.raw_max, val);
        out.norm_min = std::min(out.norm_min, val / cvert);
        out.norm_max = std::max(out.norm_max, val / cvert);
        ++out.samples;
    }
    out.pass = out.norm_min >= 1.0 / C && out.norm_max <= C;
    return out;
}

}  // namespace singscope
