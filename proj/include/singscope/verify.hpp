#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "classify.hpp"
#include "fit.hpp"
#include "newton.hpp"
#include "roots.hpp"
#include "series.hpp"

namespace singscope {

/// Desk-scale numeric reproduction of the necessary-condition exponents and
/// the decay estimates. Everything here is deterministic: tensor midpoint
/// rules for measures, fixed-panel Gauss quadrature for oscillatory
/// integrals, least-squares fits over dyadic sweeps.
struct VerifyOptions {
    double epsilon = 0.25;  // radius of the base neighborhood Omega_eps
    int grid = 1024;        // midpoint cells per axis
    double delta_min = std::pow(2.0, -20);
    double delta_max = std::pow(2.0, -13);
    int delta_points = 8;
    double lambda_min = std::pow(2.0, 10);
    double lambda_max = std::pow(2.0, 20);
    int lambda_points = 8;
    double tolerance = 0.05;
};

namespace detail {

inline std::vector<double> dyadic_sweep(double lo, double hi, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
    return out;
}

/// Smooth bump, identically shaped everywhere it is used: value 1 at the
/// center, support |t| < 1.
inline double bump(double t) {
    double u = t * t;
    return u < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u)) : 0.0;
}

/// Validation pass for |grad phi| <= 1/10 over Omega_eps. The exponent fits
/// do not depend on the bound (the measures are computed from the raw
/// constraints), so a violation is recorded on the fit, not fatal.
inline bool gradient_within_bound(const LatticePolynomial& phi, double eps) {
    LatticePolynomial d1 = phi.derivative(1), d2 = phi.derivative(2);
    int g = 64;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            double x1 = -eps + (2 * eps) * (i + 0.5) / g;
            double x2 = -eps + (2 * eps) * (j + 0.5) / g;
            if (x1 * x1 + x2 * x2 >= eps * eps) continue;
            double gx = d1.eval<double>(x1, x2), gy = d2.eval<double>(x1, x2);
            if (std::sqrt(gx * gx + gy * gy) > 0.1) return false;
        }
    return true;
}

/// One-dimensional measure of {x2 in (lo, hi) : |g(x2) - c| < delta} for the
/// column polynomial g = phi(x1, .). Band endpoints are located as roots of
/// g - c -+ delta, so arbitrarily thin bands are measured exactly.
inline double column_band_measure(const std::vector<double>& g, double c, double delta, double lo, double hi) {
    std::vector<double> cuts{lo, hi};
    for (int sgn : {-1, 1}) {
        std::vector<double> shifted = g;
        if (shifted.empty()) shifted.push_back(0.0);
        shifted[0] -= c + sgn * delta;
        for (double r : real_roots_in(shifted, lo, hi)) cuts.push_back(r);
    }
    std::sort(cuts.begin(), cuts.end());
    double len = 0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        double mid = 0.5 * (cuts[i - 1] + cuts[i]);
        double val = 0;
        for (std::size_t k = g.size(); k-- > 0;) val = val * mid + g[k];
        if (std::abs(val - c) < delta) len += cuts[i] - cuts[i - 1];
    }
    return len;
}

/// Coefficients of x2 -> phi(x1, x2) at a fixed x1.
inline std::vector<double> column_coeffs(const LatticePolynomial& phi, double x1) {
    std::vector<double> g(std::max(phi.degree2() + 1, 1), 0.0);
    for (const auto& [m, c] : phi.terms()) g[m.e2] += to_double(c) * std::pow(x1, m.e1);
    return g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sublevel measures and box families
// ---------------------------------------------------------------------------

/// Measure of {x in Omega_eps : |x_i - z_i| <= delta_i, |1 + phi(x) - z3| <=
/// delta_3}: midpoint columns in x1 (clipped to the box, so the cost scales
/// with the box), exact band intervals in x2. Arbitrarily thin height bands
/// are therefore resolved.
inline double intersection_measure(const LatticePolynomial& phi, double delta1, double delta2, double delta3,
                                   double z1, double z2, double z3, const VerifyOptions& opt = {}) {
    if (opt.grid < 64) throw verify_error("grid must be at least 64 per axis");
    double eps = opt.epsilon;
    double lo1 = std::max(-eps, z1 - delta1), hi1 = std::min(eps, z1 + delta1);
    if (lo1 >= hi1) return 0.0;
    int g = opt.grid;
    double h1 = (hi1 - lo1) / g;
    double area = 0;
    for (int i = 0; i < g; ++i) {
        double x1 = lo1 + h1 * (i + 0.5);
        double x2max = std::sqrt(std::max(eps * eps - x1 * x1, 0.0));
        double lo2 = std::max(-x2max, z2 - delta2), hi2 = std::min(x2max, z2 + delta2);
        if (lo2 >= hi2) continue;
        std::vector<double> col = detail::column_coeffs(phi, x1);
        area += h1 * detail::column_band_measure(col, z3 - 1.0, delta3, lo2, hi2);
    }
    return area;
}

/// Fit of log |{ |phi| < delta }| against log delta; the prediction is the
/// reciprocal height 1/h = 1/2 + 1/n.
inline FitResult sublevel_exponent(const LatticePolynomial& phi, const Rational& predicted,
                                   const VerifyOptions& opt = {}) {
    bool grad_ok = detail::gradient_within_bound(phi, opt.epsilon);
    int g = std::max(opt.grid, 512);
    double eps = opt.epsilon, h = 2 * eps / g;
    std::vector<double> deltas = detail::dyadic_sweep(opt.delta_min, opt.delta_max, opt.delta_points);
    std::vector<double> areas(deltas.size(), 0.0);
    for (int i = 0; i < g; ++i) {
        double x1 = -eps + h * (i + 0.5);
        double x2max = std::sqrt(std::max(eps * eps - x1 * x1, 0.0));
        if (x2max == 0) continue;
        std::vector<double> col = detail::column_coeffs(phi, x1);
        for (std::size_t k = 0; k < deltas.size(); ++k)
            areas[k] += h * detail::column_band_measure(col, 0.0, deltas[k], -x2max, x2max);
    }
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < deltas.size(); ++k) pts.emplace_back(deltas[k], areas[k]);
    FitResult fr = fit_loglog(pts, predicted, opt.tolerance);
    fr.gradient_ok = grad_ok;
    return fr;
}

struct BoxFamilyInput {
    int k_case = 0;            // 0, 1 or 2
    Rational p = 0;            // Lebesgue exponent probed
    Weight kappa_e;            // line-adapted weight (k = 1 only)
    LatticePolynomial alpha;   // line-adapting shear as a polynomial in x2 (k = 1 only)
};

/// log-log fit of the normalized box-family integral
/// I(delta) = int |T_delta(z') cap S|^p dz' / |T_delta| over the
/// construction's z'-range.
inline FitResult box_family_exponent(const LatticePolynomial& phi, const BoxFamilyInput& in, const Rational& predicted,
                                     const VerifyOptions& opt = {}) {
    bool grad_ok = detail::gradient_within_bound(phi, opt.epsilon);
    double eps = opt.epsilon;
    double p = to_double(in.p);
    int g_out = 48;
    VerifyOptions inner = opt;
    inner.grid = std::max(128, opt.grid / 4);
    std::vector<double> deltas =
        detail::dyadic_sweep(std::max(opt.delta_min, std::pow(2.0, -16)), std::max(opt.delta_max, std::pow(2.0, -9)),
                             opt.delta_points);
    std::vector<std::pair<double, double>> pts;
    for (double delta : deltas) {
        double integral = 0;
        if (in.k_case == 0) {
            // delta-cube centered on the surface point over z'
            double hz = 2 * eps / g_out;
            double acc = 0;
            for (int i = 0; i < g_out; ++i)
                for (int j = 0; j < g_out; ++j) {
                    double z1 = -eps + hz * (i + 0.5), z2 = -eps + hz * (j + 0.5);
                    if (z1 * z1 + z2 * z2 >= eps * eps) continue;
                    double z3 = 1.0 + phi.eval<double>(z1, z2);
                    double m = intersection_measure(phi, delta, delta, delta, z1, z2, z3, inner);
                    acc += std::pow(m, p) * hz * hz;
                }
            integral = acc / (8 * delta * delta * delta);
        } else if (in.k_case == 2) {
            // slab: the measure is the sublevel set, independent of z'
            VerifyOptions wide = inner;
            wide.grid = std::max(512, opt.grid);
            double m = intersection_measure(phi, 2 * eps, 2 * eps, delta, 0, 0, 1.0, wide);
            double omega_area = M_PI * eps * eps;
            integral = std::pow(m, p) * omega_area / (8 * delta);
        } else {
            // k = 1: thin in x2 and x3, full in x1, in line-adapted data
            double k2 = to_double(in.kappa_e.k2);
            double d2 = std::pow(delta, 1.0 - k2);
            double zr = 0.5 * eps * std::pow(delta, k2);  // z2-range
            double hz2 = 2 * zr / g_out;
            VerifyOptions thin = inner;
            thin.grid = std::max(256, opt.grid / 2);
            double acc = 0;
            // the measure does not depend on z1 (the x1 constraint is
            // inactive), so one z2 sweep suffices and the z1 integral is a
            // plain length factor
            for (int j = 0; j < g_out; ++j) {
                double z2 = -zr + hz2 * (j + 0.5);
                // z3 from the alpha-shifted slice: 1 + phi(alpha(z2), z2)
                double a = in.alpha.eval<double>(0.0, z2);
                double z3 = 1.0 + phi.eval<double>(a, z2);
                double m = intersection_measure(phi, 2 * eps, d2, delta, 0.0, z2, z3, thin);
                acc += std::pow(m, p) * hz2;
            }
            integral = acc * (2 * eps) / (8 * d2 * delta);
        }
        if (!(integral > 0)) throw verify_error("box-family integral vanished; widen the sweep");
        pts.emplace_back(delta, integral);
    }
    FitResult fr = fit_loglog(pts, predicted, opt.tolerance > 0.1 ? opt.tolerance : 0.1);
    fr.gradient_ok = grad_ok;
    return fr;
}

/// Zero crossing in p of the box-family exponent: the exponent is affine in
/// p, so two probes pin the crossing.
inline double box_family_threshold(const LatticePolynomial& phi, BoxFamilyInput in, const VerifyOptions& opt = {}) {
    double p1 = 1.45, p2 = 1.75;
    in.p = parse_rational("29/20");
    FitResult f1 = box_family_exponent(phi, in, 0, opt);
    in.p = parse_rational("7/4");
    FitResult f2 = box_family_exponent(phi, in, 0, opt);
    double e1 = f1.exponent_hat, e2 = f2.exponent_hat;
    if (e2 == e1) throw verify_error("box-family exponent does not vary with p");
    return p1 - e1 * (p2 - p1) / (e2 - e1);
}

// ---------------------------------------------------------------------------
// Oscillatory decay fits
// ---------------------------------------------------------------------------

namespace detail {

/// Composite Gauss-Legendre quadrature (10 nodes per panel) of
/// f over [lo, hi], with the panel count scaled to the phase speed.
template <typename F>
std::complex<double> oscillatory_quad(F&& f, double lo, double hi, int panels) {
    static const double xs[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                                 0.9739065285171717};
    static const double ws[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                 0.0666713443086881};
    std::complex<double> acc = 0;
    double h = (hi - lo) / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
        double a = lo + pnl * h, mid = a + h / 2, half = h / 2;
        for (int q = 0; q < 5; ++q) {
            acc += ws[q] * half * (f(mid + half * xs[q]) + f(mid - half * xs[q]));
        }
    }
    return acc;
}

}  // namespace detail

/// van der Corput decay: fitted |int e^{i lambda phase(x)} chi0(x) dx| against
/// lambda; predicted -1/m under an m-th derivative lower bound (checked).
inline FitResult corput_decay(const UPoly& phase, int m, const VerifyOptions& opt = {}) {
    if (m < 1) throw verify_error("derivative order must be positive");
    double w = 0.5;
    UPoly dm = phase;
    for (int i = 0; i < m; ++i) dm = uderiv(dm);
    for (int i = 0; i <= 512; ++i) {
        double x = -w + 2 * w * i / 512.0;
        double v = 0;
        for (auto it = dm.rbegin(); it != dm.rend(); ++it) v = v * x + to_double(*it);
        if (std::abs(v) < 1.0 - 1e-12) throw verify_error("|phase^(m)| < 1 on the window");
    }
    UPoly d1 = uderiv(phase);
    double speed = 0;
    for (double x = -w; x <= w; x += w / 64) {
        double v = 0;
        for (auto it = d1.rbegin(); it != d1.rend(); ++it) v = v * x + to_double(*it);
        speed = std::max(speed, std::abs(v));
    }
    // a monotone non-stationary phase decays beyond the double-precision
    // dynamic range almost immediately; keep the sweep where the integral is
    // resolvable
    double lam_lo = m == 1 ? 16.0 : opt.lambda_min;
    double lam_hi = m == 1 ? 512.0 : opt.lambda_max;
    std::vector<double> lambdas = detail::dyadic_sweep(lam_lo, lam_hi, opt.lambda_points);
    std::vector<std::pair<double, double>> pts;
    for (double lambda : lambdas) {
        int panels = std::max(64, static_cast<int>(lambda * speed * w / 2.5) + 1);
        auto f = [&](double x) {
            double ph = 0;
            for (auto it = phase.rbegin(); it != phase.rend(); ++it) ph = ph * x + to_double(*it);
            return std::polar(detail::bump(x / w), lambda * ph);
        };
        std::complex<double> val = detail::oscillatory_quad(f, -w, w, panels);
        pts.emplace_back(lambda, std::abs(val));
    }
    return fit_loglog(pts, rat(-1, m), opt.tolerance, /*one_sided=*/m == 1);
}

struct OscillatoryRegion {
    int j = 0;          // window |x1| ~ 2^{-j}
    int k = 0;          // s2 ~ 2^{-k}
    Rational A, B;      // transition-domain vertex (B_l, A_l)
    int margin = 2;     // dyadic safety margin for the domain check
};

struct OscillatoryJResult {
    FitResult fit;
    double envelope_ratio = 0;  // sup of |J| over 2^{-j} (lambda d_{j,k})^{-1/2}
};

/// Decay fit of the one-dimensional oscillatory integral
/// J(lambda) = int e^{-i lambda (phi1(x1, s2) + s1 x1)} eta(x1) dx1 on a
/// dyadic window inside a transition domain; compared against the
/// (lambda d_{j,k})^{-1/2} envelope rate.
inline OscillatoryJResult oscillatory_J(const TruncatedSeries& phi1, double s1, const OscillatoryRegion& region,
                                        const std::vector<Rational>& slopes, const VerifyOptions& opt = {},
                                        double pass_slack = 0.07) {
    // verify the window sits inside a transition domain: between consecutive
    // cluster scales, with the stated dyadic margin
    bool inside = false;
    Rational jq(region.j), kq(region.k), mq(region.margin);
    std::size_t L = slopes.size();
    for (std::size_t l = 0; l <= L; ++l) {
        bool above_next = l == 0 || jq >= kq * slopes[l - 1] + mq;  // |x1| below the scale of cluster l
        bool below_prev = l == L || jq <= kq * slopes[l] - mq;      // |x1| above the scale of cluster l+1
        if (above_next && below_prev) inside = true;
    }
    if (!inside) throw verify_error("window (j, k) is not inside a transition domain at the stated margin");

    double s2 = std::pow(2.0, -region.k);
    double x0 = 1.5 * std::pow(2.0, -region.j);
    double wwin = 0.45 * std::pow(2.0, -region.j);
    const LatticePolynomial& f = phi1.poly();
    LatticePolynomial d1 = f.derivative(1);
    double speed = 1e-6;
    for (int q = 0; q <= 32; ++q) {
        double x = x0 - wwin + 2 * wwin * q / 32.0;
        speed = std::max(speed, std::abs(d1.eval<double>(x, s2) + s1));
    }
    // level size of the phase second derivative on the window
    double level = std::pow(2.0, -region.k * to_double(region.A) - region.j * to_double(region.B));
    double d_regime = level * std::pow(2.0, -2.0 * region.j);  // d_{j,k}

    // stationary point present iff d1(phase) changes sign across the window
    double g_lo = d1.eval<double>(x0 - wwin, s2) + s1;
    double g_hi = d1.eval<double>(x0 + wwin, s2) + s1;
    bool stationary = g_lo * g_hi <= 0;

    // the decay regime needs lambda d_{j,k} >= 1: extend the sweep when the
    // requested range misses it entirely
    double lam_lo = opt.lambda_min, lam_hi = opt.lambda_max;
    if (stationary) {
        lam_lo = std::max(lam_lo, 1.0 / d_regime);
        lam_hi = std::max(lam_hi, 256.0 * lam_lo);
    }
    std::vector<double> lambdas = detail::dyadic_sweep(lam_lo, lam_hi, opt.lambda_points);
    std::vector<std::pair<double, double>> pts;
    double env_max = 0;
    for (double lambda : lambdas) {
        if (stationary && lambda * d_regime < 1.0) continue;  // below the decay regime
        int panels = std::max(64, static_cast<int>(lambda * speed * wwin / 2.5) + 1);
        auto fn = [&](double x) {
            return std::polar(detail::bump((x - x0) / wwin), -lambda * (f.eval<double>(x, s2) + s1 * x));
        };
        std::complex<double> val = detail::oscillatory_quad(fn, x0 - wwin, x0 + wwin, panels);
        double mag = std::abs(val);
        if (!(mag > 1e-250)) continue;
        pts.emplace_back(lambda, mag);
        double d_jk = level * std::pow(2.0, -2.0 * region.j);
        double envelope = std::pow(2.0, -region.j) / std::sqrt(std::max(lambda * d_jk, 1.0));
        env_max = std::max(env_max, mag / envelope);
    }
    OscillatoryJResult out;
    out.fit = fit_loglog(pts, stationary ? rat(-1, 2) : Rational(-1), pass_slack, /*one_sided=*/true);
    out.envelope_ratio = env_max;
    return out;
}

// ---------------------------------------------------------------------------
// Stationary-phase identity check (two-dimensional model)
// ---------------------------------------------------------------------------

/// |I(u)| for I = iint e^{iN(x^2 + eta (u - x))} a(x) b(eta) deta dx, fitted
/// against N: the phase-inversion identity forces the rate N^{-1}.
inline FitResult phase_inversion_decay(double u, const VerifyOptions& opt = {}) {
    auto F = [&](double t) {
        // int e^{i t eta} bump(eta / 0.5) deta
        int panels = std::max(32, static_cast<int>(std::abs(t) * 0.5 / 2.5) + 1);
        return detail::oscillatory_quad([&](double eta) { return std::polar(detail::bump(eta / 0.5), t * eta); },
                                        -0.5, 0.5, panels);
    };
    std::vector<double> sweep = detail::dyadic_sweep(64.0, 8192.0, 8);
    std::vector<std::pair<double, double>> pts;
    for (double N : sweep) {
        double cut = 400.0 / N;
        int panels = std::max(256, static_cast<int>(N * (std::abs(u) + cut) * cut) + 1);
        auto fn = [&](double x) {
            return std::polar(detail::bump(x / 0.5), N * x * x) * F(N * (u - x));
        };
        std::complex<double> val = detail::oscillatory_quad(fn, u - cut, u + cut, std::min(panels, 4000));
        pts.emplace_back(N, std::abs(val));
    }
    return fit_loglog(pts, Rational(-1), opt.tolerance);
}

}  // namespace singscope
