#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "ppsource/errors.hpp"

namespace ppsource {

// Brent root finder on [a,b] with f(a), f(b) of opposite sign.
template <class F>
double brent_root(F&& f, double a, double b, double xtol = 1e-14, int max_iter = 200) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw NumericError("brent_root: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // inverse quadratic / secant step
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
    }
    throw NumericError("brent_root: no convergence after max iterations");
}

// Golden-section maximization on [a,b]; returns the abscissa of the maximum.
template <class F>
double golden_max(F&& f, double a, double b, double xtol = 1e-7) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

namespace detail {

template <class F>
double adaptive_simpson_rec(F& f, double a, double m, double b,
                            double fa, double fm, double fb, double whole,
                            double eps, int depth, double& achieved) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (depth <= 0 || std::abs(err) <= eps) {
        if (depth <= 0) achieved += std::abs(err);
        return left + right + err;  // Richardson correction
    }
    return adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth - 1, achieved)
         + adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth - 1, achieved);
}

}  // namespace detail

// Adaptive Simpson quadrature with embedded (Richardson) error estimate.
// Tolerance is max(abs_floor, rel_tol * |first estimate|); throws NumericError
// naming the achieved tolerance when the recursion depth is exhausted.
template <class F>
double integrate_adaptive(F&& f, double a, double b,
                          double rel_tol = 1e-9, double abs_floor = 1e-14,
                          int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double eps = std::max(abs_floor, rel_tol * std::abs(whole));
    double leftover = 0.0;
    const double result =
        detail::adaptive_simpson_rec(f, a, m, b, fa, fm, fb, whole, eps, max_depth, leftover);
    if (!std::isfinite(result))
        throw NumericError("integrate_adaptive: non-finite integrand or result");
    if (leftover > std::max(abs_floor, rel_tol * std::abs(result)))
        throw NumericError("integrate_adaptive: tolerance not reached, achieved " +
                           std::to_string(leftover));
    return result;
}

}  // namespace ppsource
