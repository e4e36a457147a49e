#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ppsource/dispersion.hpp"
#include "ppsource/errors.hpp"
#include "ppsource/numeric.hpp"
#include "ppsource/units.hpp"

namespace ppsource {

struct PumpSpec {
    double wavelength = 0.0;  // m
    double waist = 0.0;       // m, gaussian waist at the crystal

    void validate() const {
        if (!(wavelength > 0.0)) throw ConsistencyError("pump wavelength must be positive");
        if (!(waist > 0.0)) throw ConsistencyError("pump waist must be positive");
    }
};

struct PhaseMatchPoint {
    double omega_s = 0.0;   // rad/s
    double theta_s = 0.0;   // rad, internal
    double theta_i = 0.0;   // rad, internal
    double dk_x = 0.0;      // 1/m
    double dk_y = 0.0;      // 1/m
    double dk_z = 0.0;      // 1/m
    double phi = 0.0;       // in [0, 1]
};

struct PhaseMatchSolution {
    double lambda_s = 0.0;      // m
    double lambda_i = 0.0;      // m
    double omega_s = 0.0;       // rad/s
    double omega_i = 0.0;       // rad/s
    double theta_s_int = 0.0;   // rad
    double theta_i_int = 0.0;   // rad
    double theta_s_ext = 0.0;   // rad
    double theta_i_ext = 0.0;   // rad
    double residual_dkz = 0.0;  // 1/m
};

struct CollectionMode {
    double mfd = 0.0;                 // m, fiber mode-field diameter
    double waist_at_crystal = 0.0;    // m
    double central_wavelength = 0.0;  // m, 0 until assigned
    double external_angle = 0.0;      // rad
    std::optional<double> bandwidth_fwhm_nm;  // filled by extract_bandwidth or an explicit filter

    void validate() const {
        if (!(waist_at_crystal > 0.0)) throw ConsistencyError("collection waist must be positive");
        if (!(mfd > 0.0)) throw ConsistencyError("fiber mode-field diameter must be positive");
    }
};

enum class Arm { heralding, heralded };

// sinc^2 with the two-term series below |x| = 1e-6. Half power sits at
// x = 1.3915573...
inline double sinc_sq(double x) {
    if (std::abs(x) < 1e-6) return 1.0 - x * x / 3.0;
    const double s = std::sin(x) / x;
    return s * s;
}

inline double snell_internal(double theta_ext, double n) {
    return std::asin(std::sin(theta_ext) / n);
}

inline double snell_external(double theta_int, double n) {
    const double s = std::sin(theta_int) * n;
    if (std::abs(s) > 1.0)
        throw DomainError("internal angle beyond total internal reflection");
    return std::asin(s);
}

struct DeltaK {
    double dk_x = 0.0;
    double dk_y = 0.0;
    double dk_z = 0.0;
};

// Wavevector mismatch for the quasi-phase-matched interaction. Angles are
// internal magnitudes with signal and idler on opposite sides of the pump
// axis, so the transverse components subtract:
//   dk_x = k_s sin(theta_s) - k_i sin(theta_i),  dk_y = 0.
inline DeltaK delta_k(const CrystalSpec& crystal, const PumpSpec& pump,
                      double omega_s, double theta_s, double theta_i) {
    const double omega_p = omega_from_lambda(pump.wavelength);
    if (omega_s >= omega_p)
        throw DomainError("signal frequency must be below the pump frequency");
    const double omega_i = omega_p - omega_s;

    const double T = crystal.temperature;
    const auto& set = crystal.sellmeier;
    const double n_p = refractive_index(m_to_nm(pump.wavelength), T, set);
    const double n_s = refractive_index(m_to_nm(lambda_from_omega(omega_s)), T, set);
    const double n_i = refractive_index(m_to_nm(lambda_from_omega(omega_i)), T, set);

    const double k_p = n_p * omega_p / speed_of_light;
    const double k_s = n_s * omega_s / speed_of_light;
    const double k_i = n_i * omega_i / speed_of_light;

    DeltaK d;
    d.dk_x = k_s * std::sin(theta_s) - k_i * std::sin(theta_i);
    d.dk_y = 0.0;
    d.dk_z = k_p - k_s * std::cos(theta_s) - k_i * std::cos(theta_i)
           - 2.0 * pi / crystal.poling_period;
    return d;
}

// Pump-broadened phase-matching function,
//   Phi = exp(-w_p^2 (dk_x^2 + dk_y^2) / 4) * sinc^2(dk_z L / 2),
// normalized to 1 at perfect matching.
inline double phi(const CrystalSpec& crystal, const PumpSpec& pump,
                  double omega_s, double theta_s, double theta_i) {
    const DeltaK d = delta_k(crystal, pump, omega_s, theta_s, theta_i);
    const double wp = pump.waist;
    const double trans = std::exp(-wp * wp * (d.dk_x * d.dk_x + d.dk_y * d.dk_y) / 4.0);
    return trans * sinc_sq(0.5 * d.dk_z * crystal.effective_length());
}

inline PhaseMatchPoint phase_match_point(const CrystalSpec& crystal, const PumpSpec& pump,
                                         double omega_s, double theta_s, double theta_i) {
    PhaseMatchPoint p;
    p.omega_s = omega_s;
    p.theta_s = theta_s;
    p.theta_i = theta_i;
    const DeltaK d = delta_k(crystal, pump, omega_s, theta_s, theta_i);
    p.dk_x = d.dk_x;
    p.dk_y = d.dk_y;
    p.dk_z = d.dk_z;
    const double wp = pump.waist;
    p.phi = std::exp(-wp * wp * (d.dk_x * d.dk_x + d.dk_y * d.dk_y) / 4.0)
          * sinc_sq(0.5 * d.dk_z * crystal.effective_length());
    return p;
}

// FWHM angular acceptance of a collection mode, a * lambda / (pi w_o) with
// a = 2 sqrt(ln 2); external angle.
inline double angular_fwhm(const CollectionMode& mode) {
    if (!(mode.waist_at_crystal > 0.0))
        throw ConsistencyError("collection waist must be positive");
    if (!(mode.central_wavelength > 0.0))
        throw ConsistencyError("collection mode has no central wavelength assigned");
    return fwhm_gauss_a * mode.central_wavelength / (pi * mode.waist_at_crystal);
}

namespace detail {

// Signal wavelength window (in m) inside which both signal and idler stay
// within the Sellmeier validity range.
inline std::pair<double, double> signal_window(const CrystalSpec& crystal, const PumpSpec& pump) {
    const double lam_p = pump.wavelength;
    const double lam_min = nm_to_m(crystal.sellmeier.valid_wavelength_min_nm);
    const double lam_max = nm_to_m(crystal.sellmeier.valid_wavelength_max_nm);
    if (lam_max <= lam_p)
        throw NoSolutionError("pump wavelength at or beyond the sellmeier validity maximum");
    // idler within validity requires 1/lam_s <= 1/lam_p - 1/lam_max
    const double lo = std::max(lam_min, lam_p * lam_max / (lam_max - lam_p));
    return {lo * (1.0 + 1e-12), lam_max * (1.0 - 1e-12)};
}

// Idler angle that balances the transverse mismatch at the given signal
// angle; NaN when no such angle exists.
inline double balance_theta_i(const CrystalSpec& crystal, const PumpSpec& pump,
                              double omega_s, double theta_s) {
    const double omega_p = omega_from_lambda(pump.wavelength);
    const double omega_i = omega_p - omega_s;
    const double T = crystal.temperature;
    const double n_s = refractive_index(m_to_nm(lambda_from_omega(omega_s)), T, crystal.sellmeier);
    const double n_i = refractive_index(m_to_nm(lambda_from_omega(omega_i)), T, crystal.sellmeier);
    const double arg = n_s * omega_s * std::sin(theta_s) / (n_i * omega_i);
    if (std::abs(arg) > 1.0) return std::numeric_limits<double>::quiet_NaN();
    return std::asin(arg);
}

// and the mirror image: signal angle balancing a fixed idler angle
inline double balance_theta_s(const CrystalSpec& crystal, const PumpSpec& pump,
                              double omega_s, double theta_i) {
    const double omega_p = omega_from_lambda(pump.wavelength);
    const double omega_i = omega_p - omega_s;
    const double T = crystal.temperature;
    const double n_s = refractive_index(m_to_nm(lambda_from_omega(omega_s)), T, crystal.sellmeier);
    const double n_i = refractive_index(m_to_nm(lambda_from_omega(omega_i)), T, crystal.sellmeier);
    const double arg = n_i * omega_i * std::sin(theta_i) / (n_s * omega_s);
    if (std::abs(arg) > 1.0) return std::numeric_limits<double>::quiet_NaN();
    return std::asin(arg);
}

// Longitudinal mismatch along the transverse-balanced line at a fixed
// external signal angle.
inline double balanced_dkz(const CrystalSpec& crystal, const PumpSpec& pump,
                           double lambda_s, double theta_s_ext) {
    const double T = crystal.temperature;
    const double n_s = refractive_index(m_to_nm(lambda_s), T, crystal.sellmeier);
    const double th_s = snell_internal(theta_s_ext, n_s);
    const double omega_s = omega_from_lambda(lambda_s);
    const double th_i = balance_theta_i(crystal, pump, omega_s, th_s);
    if (std::isnan(th_i)) return std::numeric_limits<double>::quiet_NaN();
    return delta_k(crystal, pump, omega_s, th_s, th_i).dk_z;
}

}  // namespace detail

// Solves for the central quasi-phase-matched emission at a fixed external
// signal angle: energy conservation, dk_x = 0 and dk_z = 0 simultaneously.
// When several roots exist in the validity window the shortest signal
// wavelength is returned (the heralding arm is the short-wavelength arm).
inline PhaseMatchSolution solve_central(const CrystalSpec& crystal, const PumpSpec& pump,
                                        double theta_s_ext) {
    crystal.validate();
    pump.validate();
    const auto [lo, hi] = detail::signal_window(crystal, pump);
    if (!(hi > lo))
        throw NoSolutionError("no signal window inside the sellmeier validity range");

    const int n_scan = 2000;
    auto g = [&](double lam) { return detail::balanced_dkz(crystal, pump, lam, theta_s_ext); };

    std::vector<double> xs(n_scan + 1), gs(n_scan + 1);
    for (int i = 0; i <= n_scan; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / n_scan;
        gs[i] = g(xs[i]);
    }
    double root = std::numeric_limits<double>::quiet_NaN();
    for (int i = 1; i <= n_scan; ++i) {
        if (std::isfinite(gs[i - 1]) && std::isfinite(gs[i]) &&
            (gs[i - 1] == 0.0 || gs[i - 1] * gs[i] < 0.0)) {
            root = brent_root(g, xs[i - 1], xs[i], 1e-18);
            break;
        }
    }
    if (std::isnan(root)) {
        // degenerate configurations can graze zero without a sign change;
        // look for a tangent root at the interior maximum of dk_z
        int im = -1;
        double gmax = -std::numeric_limits<double>::infinity();
        for (int i = 1; i < n_scan; ++i) {
            if (std::isfinite(gs[i]) && gs[i] > gmax) {
                gmax = gs[i];
                im = i;
            }
        }
        if (im > 0 && std::isfinite(gs[im - 1]) && std::isfinite(gs[im + 1])) {
            const double xm = golden_max(g, xs[im - 1], xs[im + 1], 1e-14);
            const double gm = g(xm);
            if (gm > 0.0)
                root = brent_root(g, xs[im - 1], xm, 1e-18);
            else if (std::abs(gm) * crystal.effective_length() <= 1e-6)
                root = xm;
        }
    }
    if (std::isnan(root))
        throw NoSolutionError(
            "no quasi-phase-matched root: balanced dk_z has no zero for signal "
            "wavelengths in [" + format_sig(m_to_nm(lo)) + ", " + format_sig(m_to_nm(hi)) +
            "] nm (dk_z spans " + format_sig(g(lo)) + " to " + format_sig(g(hi)) + " 1/m)");

    PhaseMatchSolution sol;
    sol.lambda_s = root;
    sol.omega_s = omega_from_lambda(root);
    sol.omega_i = omega_from_lambda(pump.wavelength) - sol.omega_s;
    sol.lambda_i = lambda_from_omega(sol.omega_i);
    const double T = crystal.temperature;
    const double n_s = refractive_index(m_to_nm(sol.lambda_s), T, crystal.sellmeier);
    const double n_i = refractive_index(m_to_nm(sol.lambda_i), T, crystal.sellmeier);
    sol.theta_s_ext = theta_s_ext;
    sol.theta_s_int = snell_internal(theta_s_ext, n_s);
    sol.theta_i_int = detail::balance_theta_i(crystal, pump, sol.omega_s, sol.theta_s_int);
    sol.theta_i_ext = snell_external(sol.theta_i_int, n_i);
    sol.residual_dkz = delta_k(crystal, pump, sol.omega_s, sol.theta_s_int, sol.theta_i_int).dk_z;
    return sol;
}

struct BandwidthOptions {
    double coarse_step_nm = 0.2;     // initial bracket step for the 0.5 crossings
    double bisection_tol_nm = 1e-4;  // wavelength tolerance of the boundary inversion
    double golden_tol_rad = 1e-7;    // tolerance of the conjugate-angle maximization
    int coarse_points = 200;         // grid seeding the maximization
};

namespace detail {

// Phi maximized over the conjugate angle. The search window is centred on the
// transverse-balance angle; its width covers both the pump-envelope width in
// conjugate angle and the collection acceptance.
template <class ThetaFixed>
double phi_max_over_conjugate(const CrystalSpec& crystal, const PumpSpec& pump,
                              double omega_s, ThetaFixed theta_fixed, Arm collected,
                              const BandwidthOptions& opt) {
    const double omega_p = omega_from_lambda(pump.wavelength);
    const double omega_i = omega_p - omega_s;
    double center;
    double k_conj;
    const double T = crystal.temperature;
    if (collected == Arm::heralding) {
        center = balance_theta_i(crystal, pump, omega_s, theta_fixed);
        const double n_i = refractive_index(m_to_nm(lambda_from_omega(omega_i)), T,
                                            crystal.sellmeier);
        k_conj = n_i * omega_i / speed_of_light;
    } else {
        center = balance_theta_s(crystal, pump, omega_s, theta_fixed);
        const double n_s = refractive_index(m_to_nm(lambda_from_omega(omega_s)), T,
                                            crystal.sellmeier);
        k_conj = n_s * omega_s / speed_of_light;
    }
    if (std::isnan(center)) return 0.0;
    // half-width of the transverse envelope in conjugate angle
    const double envelope = 2.0 * fwhm_gauss_a / (pump.waist * k_conj);
    const double window = std::max(8.0 * envelope, 0.012);

    auto f = [&](double conj) {
        return collected == Arm::heralding
                   ? phi(crystal, pump, omega_s, theta_fixed, conj)
                   : phi(crystal, pump, omega_s, conj, theta_fixed);
    };
    const double a = center - window;
    const double b = center + window;
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i < opt.coarse_points; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / (opt.coarse_points - 1);
        const double v = f(x);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double step = (b - a) / (opt.coarse_points - 1);
    const double xlo = a + std::max(0, best - 1) * step;
    const double xhi = a + std::min(opt.coarse_points - 1, best + 1) * step;
    const double xm = golden_max(f, xlo, xhi, opt.golden_tol_rad);
    return f(xm);
}

struct HalfMaxInterval {
    double lambda_lo = 0.0;  // m, signal wavelength
    double lambda_hi = 0.0;
};

// Indicator inversion: the wavelengths where the conjugate-maximized Phi
// crosses 0.5 on either side of the ridge at a fixed shifted collection angle.
inline HalfMaxInterval invert_indicator(const CrystalSpec& crystal, const PumpSpec& pump,
                                        double theta_edge_ext, Arm collected,
                                        double lambda_near, const BandwidthOptions& opt) {
    const auto [win_lo, win_hi] = signal_window(crystal, pump);
    const double T = crystal.temperature;

    auto phimax_at = [&](double lambda_s) {
        const double omega_s = omega_from_lambda(lambda_s);
        double theta_fixed;
        if (collected == Arm::heralding) {
            const double n_s = refractive_index(m_to_nm(lambda_s), T, crystal.sellmeier);
            theta_fixed = snell_internal(theta_edge_ext, n_s);
        } else {
            const double lambda_i =
                lambda_from_omega(omega_from_lambda(pump.wavelength) - omega_s);
            const double n_i = refractive_index(m_to_nm(lambda_i), T, crystal.sellmeier);
            theta_fixed = snell_internal(theta_edge_ext, n_i);
        }
        return phi_max_over_conjugate(crystal, pump, omega_s, theta_fixed, collected, opt);
    };

    // ridge center at this collection angle
    auto gz = [&](double lam) {
        const double omega_s = omega_from_lambda(lam);
        double th_s, th_i;
        if (collected == Arm::heralding) {
            const double n_s = refractive_index(m_to_nm(lam), T, crystal.sellmeier);
            th_s = snell_internal(theta_edge_ext, n_s);
            th_i = balance_theta_i(crystal, pump, omega_s, th_s);
        } else {
            const double lambda_i =
                lambda_from_omega(omega_from_lambda(pump.wavelength) - omega_s);
            const double n_i = refractive_index(m_to_nm(lambda_i), T, crystal.sellmeier);
            th_i = snell_internal(theta_edge_ext, n_i);
            th_s = balance_theta_s(crystal, pump, omega_s, th_i);
        }
        if (std::isnan(th_i) || std::isnan(th_s))
            return std::numeric_limits<double>::quiet_NaN();
        return delta_k(crystal, pump, omega_s, th_s, th_i).dk_z;
    };
    double blo = std::max(win_lo, lambda_near - 0.02e-6);
    double bhi = std::min(win_hi, lambda_near + 0.02e-6);
    while (!(gz(blo) * gz(bhi) < 0.0)) {
        const double span = bhi - blo;
        blo = std::max(win_lo, blo - span);
        bhi = std::min(win_hi, bhi + span);
        if (blo == win_lo && bhi == win_hi && !(gz(blo) * gz(bhi) < 0.0))
            throw DegeneratePhaseMatchingError(
                "no phase-matching ridge near the shifted collection angle");
    }
    const double lambda_c = brent_root(gz, blo, bhi, 1e-16);
    if (phimax_at(lambda_c) <= 0.5)
        throw DegeneratePhaseMatchingError(
            "phase-matching function does not exceed 0.5 at the ridge center");

    HalfMaxInterval out;
    for (const int sgn : {+1, -1}) {
        double step = nm_to_m(opt.coarse_step_nm);
        double inside = lambda_c;
        double outside = lambda_c + sgn * step;
        outside = std::clamp(outside, win_lo, win_hi);
        while (phimax_at(outside) > 0.5) {
            inside = outside;
            step *= 1.6;
            outside = std::clamp(outside + sgn * step, win_lo, win_hi);
            if (outside == inside)  // pinned at the validity edge
                throw DegeneratePhaseMatchingError(
                    "half-maximum boundary escapes the sellmeier validity window");
        }
        auto h = [&](double lam) { return phimax_at(lam) - 0.5; };
        double a = std::min(inside, outside);
        double b = std::max(inside, outside);
        // plain bisection to the requested wavelength tolerance
        while (b - a > nm_to_m(opt.bisection_tol_nm)) {
            const double m = 0.5 * (a + b);
            if ((h(a) > 0.0) == (h(m) > 0.0))
                a = m;
            else
                b = m;
        }
        const double r = 0.5 * (a + b);
        if (sgn > 0)
            out.lambda_hi = r;
        else
            out.lambda_lo = r;
    }
    return out;
}

}  // namespace detail

// Geometrically selected FWHM bandwidth of one collection arm, in nm.
//
// Algorithm: (1) maximize Phi over the conjugate angle, (2) take the
// indicator [Phi_max > 0.5] as a function of wavelength at the collection
// angle shifted by +/- half the angular acceptance, (3) invert the indicator
// boundaries; the bandwidth is the union of the two half-maximum intervals,
// expressed at the collected arm's wavelength.
inline double extract_bandwidth(const CrystalSpec& crystal, const PumpSpec& pump,
                                const PhaseMatchSolution& sol, const CollectionMode& mode,
                                Arm arm, const BandwidthOptions& opt = {}) {
    mode.validate();
    CollectionMode m = mode;
    if (!(m.central_wavelength > 0.0))
        m.central_wavelength = (arm == Arm::heralding) ? sol.lambda_s : sol.lambda_i;
    const double dtheta = angular_fwhm(m);
    const double theta0_ext = (arm == Arm::heralding) ? sol.theta_s_ext : sol.theta_i_ext;

    double lo_s = std::numeric_limits<double>::infinity();
    double hi_s = -std::numeric_limits<double>::infinity();
    for (const double shift : {+0.5 * dtheta, -0.5 * dtheta}) {
        const auto interval = detail::invert_indicator(crystal, pump, theta0_ext + shift, arm,
                                                       sol.lambda_s, opt);
        lo_s = std::min(lo_s, interval.lambda_lo);
        hi_s = std::max(hi_s, interval.lambda_hi);
    }
    if (arm == Arm::heralding) return m_to_nm(hi_s - lo_s);

    // boundaries were located in signal wavelength; map to the idler arm
    const double inv_p = 1.0 / pump.wavelength;
    const double li_a = 1.0 / (inv_p - 1.0 / lo_s);
    const double li_b = 1.0 / (inv_p - 1.0 / hi_s);
    return m_to_nm(std::abs(li_b - li_a));
}

}  // namespace ppsource
