#pragma once

#include <json.hpp>

#include "analyze.hpp"
#include "fit.hpp"
#include "parse.hpp"

namespace singscope {

using nlohmann::json;

/// Report assembly. Exact rationals are serialized as "p/q" strings so no
/// float corruption can occur; fitted quantities are JSON numbers. Each block
/// carries a provenance marker ("exact" or "fitted").
inline json to_json(const Rational& q) { return to_string(q); }

inline json to_json(const Weight& w) { return json{{"k1", to_string(w.k1)}, {"k2", to_string(w.k2)}}; }

inline json to_json(const PointQ& p) { return json::array({to_string(p.b), to_string(p.a)}); }

inline json to_json(const ClassificationReport& rep) {
    json j;
    j["provenance"] = "exact";
    j["class"] = to_string(rep.cls);
    j["n"] = rep.n;
    if (rep.m)
        j["m"] = *rep.m;
    else
        j["m"] = "inf";
    j["h"] = to_string(rep.h);
    if (rep.kappa_e) j["kappa_e"] = to_json(*rep.kappa_e);
    if (rep.n_e_x) j["n_e_x"] = to_string(*rep.n_e_x);
    if (rep.n_e) j["n_e"] = to_string(*rep.n_e);
    if (rep.p_e) j["p_e"] = to_string(*rep.p_e);
    j["p_c"] = json{{"lower", to_string(rep.p_c_lower)},
                    {"upper", to_string(rep.p_c_upper)},
                    {"point", rep.p_c_is_point()}};
    json chain = json::array();
    for (const auto& a : rep.coord_chain) chain.push_back(to_string(a.poly()));
    j["coord_chain"] = chain;
    j["flags"] = json{{"line_adapted_input", rep.flags.line_adapted_input},
                      {"kappa2_zero", rep.flags.kappa2_zero},
                      {"m_exceeds_order", rep.flags.m_exceeds_order},
                      {"vertical_edge_uncertified", rep.flags.vertical_edge_uncertified}};
    if (rep.principal_p) j["principal_part"] = to_string(*rep.principal_p);
    return j;
}

inline json to_json(const LegendreData& leg) {
    json j;
    j["provenance"] = "exact";
    j["route"] = to_string(leg.route);
    j["B0"] = to_string(leg.B.poly().coeff(0, 0));
    j["w0_at_0"] = to_string(leg.w0.poly().coeff(0, 0));
    j["phi1"] = to_string(leg.phi1.poly());
    j["phi1_valid_order"] = leg.phi1.valid_order();
    j["alpha_tilde"] = to_string(leg.alpha_tilde.poly());
    return j;
}

inline json to_json(const ResolutionStep& s) {
    json j;
    j["branch"] = s.branch_id;
    j["step"] = s.step_index;
    json jet = json::array();
    for (const auto& t : s.jet) jet.push_back(json::array({to_string(t.exponent), t.coeff.real()}));
    j["jet"] = jet;
    json verts = json::array();
    for (const auto& v : s.vertices) verts.push_back(to_json(v));
    j["vertices"] = verts;
    json slopes = json::array();
    for (const auto& a : s.slopes) slopes.push_back(to_string(a));
    j["slopes"] = slopes;
    if (s.chosen_exponent) j["chosen_exponent"] = to_string(*s.chosen_exponent);
    if (s.chosen_coefficient) j["chosen_coefficient"] = *s.chosen_coefficient;
    j["case"] = to_string(s.case_tag);
    j["a1_ge_1"] = s.a1_ge_1;
    j["mult_routing"] = s.mult_routing == MultLemmaRouting::not_required
                            ? "not_required"
                            : (s.mult_routing == MultLemmaRouting::simple_real_roots ? "simple_real_roots"
                                                                                    : "violation");
    j["stopped"] = s.stopped;
    j["followed_multiplicity"] = s.followed_multiplicity;
    return j;
}

inline json to_json(const Resolution& res) {
    json j;
    j["provenance"] = "exact";  // exponents and multiplicities; leading coefficients are floats
    j["nu1"] = res.roots.nu1;
    j["degree_z"] = res.roots.degree_z;
    j["fully_separated"] = res.fully_separated;
    j["max_step_reached"] = res.max_step_reached;
    j["stop_step"] = res.stop_step;
    json steps = json::array();
    for (const auto& s : res.steps) steps.push_back(to_json(s));
    j["steps"] = steps;
    return j;
}

inline json to_json(const PredictedPc& pc) {
    json j;
    j["provenance"] = "exact";
    j["p_c"] = to_string(pc.p_c);
    j["least_crossing"] = to_string(pc.least_crossing);
    json crossings = json::array();
    for (const auto& [name, p] : pc.crossings)
        crossings.push_back(json{{"family", name}, {"p", to_string(p)}});
    j["crossings"] = crossings;
    return j;
}

inline json to_json(const FitResult& fr, const std::string& name) {
    json j;
    j["provenance"] = "fitted";
    j["name"] = name;
    j["exponent_hat"] = fr.exponent_hat;
    j["stderr"] = fr.stderr_slope;
    j["predicted"] = to_string(fr.predicted);
    j["tolerance"] = fr.tolerance;
    j["pass"] = fr.pass;
    j["inconclusive"] = fr.inconclusive;
    j["one_sided"] = fr.one_sided;
    j["gradient_ok"] = fr.gradient_ok;
    j["sweep"] = json::array({fr.sweep_range.first, fr.sweep_range.second});
    json pts = json::array();
    for (const auto& [x, y] : fr.points) pts.push_back(json::array({x, y}));
    j["points"] = pts;
    return j;
}

struct ReportMeta {
    std::string version = "0.1.0";
    std::uint64_t seed = 1;
    int grid = 1024;
    int order = 0;
    int depth = 6;
    int max_steps = 20;
};

inline json assemble_report(const std::string& canonical_input, const AnalysisResult& res,
                            const std::vector<json>& verification, const ReportMeta& meta) {
    json j;
    j["input"] = json{{"expression", canonical_input}, {"order", meta.order}, {"depth", meta.depth},
                      {"max_steps", meta.max_steps}};
    j["classification"] = to_json(res.classification);
    if (res.legendre) j["legendre"] = to_json(*res.legendre);
    if (res.resolution)
        j["resolution"] = to_json(*res.resolution);
    else
        j["resolution"] = json{{"steps", json::array()}, {"provenance", "exact"}};
    if (res.predicted) {
        j["summability"] = to_json(*res.predicted);
        j["summability"]["matches_classification"] =
            res.classification.p_c_is_point() && res.predicted->p_c == res.classification.p_c_lower;
    }
    j["verification"] = verification;
    j["meta"] = json{{"schema", "singscope/1"},
                     {"version", meta.version},
                     {"seed", meta.seed},
                     {"grid", meta.grid}};
    return j;
}

}  // namespace singscope
