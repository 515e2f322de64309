#pragma once

#include <optional>

#include "exponents.hpp"
#include "legendre.hpp"

namespace singscope {

/// One full pass of the symbolic pipeline: classification, Legendre
/// transform, resolution of the second-derivative phase, and the exponent
/// bookkeeping cross-validation.
struct AnalysisResult {
    ClassificationReport classification;
    std::optional<LegendreData> legendre;
    std::optional<Resolution> resolution;
    std::optional<PredictedPc> predicted;
};

inline ClassParams class_params_of(const ClassificationReport& rep) {
    ClassParams params;
    params.n = rep.n;
    if (rep.cls == SingularityClass::A_minus) {
        params.a_plus = false;
        params.bound_const = Rational(*rep.m);
        params.a1 = rat(1, rep.n - *rep.m);
    } else {
        params.a_plus = true;
        params.bound_const = *rep.n_e;
        params.a1 = *rep.n_e == rep.n ? Rational(0) : 1 / (Rational(rep.n) - *rep.n_e);
    }
    return params;
}

inline AnalysisResult analyze(const TruncatedSeries& phi, int order, const ResolveParams& rp = {}) {
    AnalysisResult out;
    out.classification = classify(phi, order);
    out.legendre = legendre_x2(phi, order);
    TruncatedSeries Phi = phase_second_derivative(out.legendre->phi1);
    if (!Phi.is_zero()) {
        out.resolution = resolve(Phi, rp);
    }
    ClassParams params = class_params_of(out.classification);
    std::vector<ResolutionStep> steps;
    if (out.resolution) steps = out.resolution->steps;
    out.predicted = predicted_pc(steps, params);
    return out;
}

inline AnalysisResult analyze(const LatticePolynomial& phi, int order, const ResolveParams& rp = {}) {
    return analyze(TruncatedSeries(phi), order, rp);
}

}  // namespace singscope
