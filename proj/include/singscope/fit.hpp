#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace singscope {

class verify_error : public std::runtime_error {
  public:
    explicit verify_error(const std::string& what) : std::runtime_error("geo-verify: " + what) {}
};

/// Least-squares slope of a log-log sweep plus the usual slope standard
/// error. The verdict compares against an exact predicted exponent at a
/// stated tolerance; a fit whose standard error exceeds the tolerance is
/// inconclusive rather than failed.
struct FitResult {
    double exponent_hat = 0;
    double stderr_slope = 0;
    double intercept = 0;
    std::pair<double, double> sweep_range{0, 0};
    std::vector<std::pair<double, double>> points;  // (log x, log y)
    Rational predicted = 0;
    double tolerance = 0;
    bool pass = false;
    bool inconclusive = false;
    bool one_sided = false;   // pass when exponent_hat <= predicted + tolerance
    bool gradient_ok = true;  // |grad phi| <= 1/10 held on the sampled region
};

inline FitResult fit_loglog(const std::vector<std::pair<double, double>>& xy, const Rational& predicted,
                            double tolerance, bool one_sided = false) {
    FitResult fr;
    fr.predicted = predicted;
    fr.tolerance = tolerance;
    fr.one_sided = one_sided;
    if (xy.size() < 6) throw verify_error("fit needs at least 6 sweep points");
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : xy) {
        if (!(y > 0)) throw verify_error("fit input is not positive");
        double lx = std::log(x), ly = std::log(y);
        fr.points.emplace_back(lx, ly);
        n += 1;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0) throw verify_error("degenerate sweep");
    fr.exponent_hat = (n * sxy - sx * sy) / denom;
    fr.intercept = (sy - fr.exponent_hat * sx) / n;
    double ss = 0;
    for (const auto& [lx, ly] : fr.points) {
        double r = ly - (fr.intercept + fr.exponent_hat * lx);
        ss += r * r;
    }
    double mean_x = sx / n, sxx_c = 0;
    for (const auto& [lx, ly] : fr.points) sxx_c += (lx - mean_x) * (lx - mean_x);
    fr.stderr_slope = std::sqrt(ss / (n - 2) / sxx_c);
    fr.sweep_range = {std::exp(fr.points.front().first), std::exp(fr.points.back().first)};
    fr.inconclusive = fr.stderr_slope > tolerance;
    double target = to_double(predicted);
    // one-sided claims ("decays at least this fast") hold regardless of the
    // curvature of the sweep, so only the two-sided verdict can be
    // inconclusive
    if (one_sided)
        fr.pass = fr.exponent_hat <= target + tolerance;
    else
        fr.pass = !fr.inconclusive && std::abs(fr.exponent_hat - target) <= tolerance;
    return fr;
}

}  // namespace singscope
