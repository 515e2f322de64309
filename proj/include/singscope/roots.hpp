#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace singscope::detail {

/// Durand-Kerner iteration for all complex roots of a dense polynomial
/// (coefficients by ascending degree, leading coefficient nonzero). Inputs
/// here are tiny-degree edge or column polynomials.
inline std::vector<std::complex<double>> all_roots(const std::vector<std::complex<double>>& coeffs) {
    int d = static_cast<int>(coeffs.size()) - 1;
    if (d < 1) return {};
    std::vector<std::complex<double>> z(d);
    double radius = 0;
    for (int i = 0; i < d; ++i) radius = std::max(radius, std::pow(std::abs(coeffs[i] / coeffs[d]), 1.0 / (d - i)));
    radius = std::max(radius, 0.5);
    std::complex<double> seed(0.4, 0.9);
    for (int i = 0; i < d; ++i) z[i] = radius * std::pow(seed, i + 1);
    for (int iter = 0; iter < 500; ++iter) {
        double moved = 0;
        for (int i = 0; i < d; ++i) {
            std::complex<double> num = coeffs[d];
            for (int k = d - 1; k >= 0; --k) num = num * z[i] + coeffs[k];
            std::complex<double> den = coeffs[d];
            for (int j = 0; j < d; ++j)
                if (j != i) den *= (z[i] - z[j]);
            if (std::abs(den) == 0) {
                z[i] += 1e-8;
                continue;
            }
            std::complex<double> delta = num / den;
            z[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-15 * std::max(1.0, radius)) break;
    }
    return z;
}

/// Real roots of a dense real polynomial within (lo, hi), sorted. Linear and
/// quadratic columns take the closed form; higher degrees fall back to the
/// full root iteration.
inline std::vector<double> real_roots_in(const std::vector<double>& coeffs, double lo, double hi) {
    std::size_t deg = coeffs.size();
    while (deg > 0 && coeffs[deg - 1] == 0) --deg;
    std::vector<double> out;
    auto keep = [&](double x) {
        if (x > lo && x < hi) out.push_back(x);
    };
    if (deg <= 1) return out;
    if (deg == 2) {
        keep(-coeffs[0] / coeffs[1]);
    } else if (deg == 3) {
        double a = coeffs[2], b = coeffs[1], c = coeffs[0];
        double disc = b * b - 4 * a * c;
        if (disc > 0) {
            double sq = std::sqrt(disc);
            double q = -0.5 * (b + (b >= 0 ? sq : -sq));  // stable pairing
            keep(q / a);
            keep(c / q);
        } else if (disc == 0) {
            keep(-b / (2 * a));
        }
    } else {
        std::vector<std::complex<double>> cc;
        for (std::size_t i = 0; i < deg; ++i) cc.emplace_back(coeffs[i], 0.0);
        for (const auto& r : all_roots(cc)) {
            if (std::abs(r.imag()) > 1e-7 * std::max(1.0, std::abs(r))) continue;
            keep(r.real());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace singscope::detail
