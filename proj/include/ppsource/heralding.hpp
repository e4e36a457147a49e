#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ppsource/dispersion.hpp"
#include "ppsource/errors.hpp"
#include "ppsource/numeric.hpp"
#include "ppsource/phasematching.hpp"
#include "ppsource/units.hpp"

namespace ppsource {

struct BeamGeometry {
    PumpSpec pump;
    CollectionMode heralding_mode;  // short-wavelength arm, provides the herald
    CollectionMode heralded_mode;   // arm whose preparation efficiency chi_P describes
    double gaussian_constant_a = fwhm_gauss_a;

    void validate() const {
        pump.validate();
        heralding_mode.validate();
        heralded_mode.validate();
        if (std::abs(gaussian_constant_a - fwhm_gauss_a) > 1e-12)
            throw ConsistencyError("gaussian FWHM constant must equal 2 sqrt(ln 2)");
    }
};

struct OverlapCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
};

struct EfficiencyBudget {
    std::optional<double> chi_p;
    std::optional<double> chi_d;
    std::optional<double> eta_det;
    double tau_opt = 1.0;
    double tau_smf_lens = 1.0;
};

// Crystal-length correction function,
//   f(p,q) = (1/sqrt(p)) Int_0^1 dx exp(-p x^2 + q^2 x^2/(4p))
//            * (Erf[qx/(2 sqrt p)] - Erf[(qx - 2p)/(2 sqrt p)]),
// equivalently (2/sqrt(pi)) Int_0^1 Int_0^1 exp(-p(x^2+y^2) + q x y) dx dy.
// The p -> 0 limit is 2/sqrt(pi); at q = 0 it reduces to
// sqrt(pi) Erf(sqrt p)^2 / (2p).
inline double correction_f(double p, double q, double rel_tol = 1e-9) {
    if (p < 0.0) throw DomainError("correction_f requires p >= 0");
    if (p < 1e-12) return 2.0 / std::sqrt(pi);
    const double sp = std::sqrt(p);
    auto integrand = [&](double x) {
        const double expo = (q * q / (4.0 * p) - p) * x * x;
        return std::exp(expo) *
               (std::erf(q * x / (2.0 * sp)) - std::erf((q * x - 2.0 * p) / (2.0 * sp)));
    };
    return integrate_adaptive(integrand, 0.0, 1.0, rel_tol, 1e-14) / sp;
}

// First factor of the heralding efficiency: how well the heralded mode waist
// matches the pump/heralding mode pair. Equals 1 exactly at the argmax waist.
inline double spatial_prefactor(double w_p, double w_o1, double w_o2) {
    const double u = w_o1 * w_o1;
    const double p = w_p * w_p;
    const double v = w_o2 * w_o2;
    const double denom = v * p + u * (v + p);
    return 4.0 * p * u * v * (u + p) / (denom * denom);
}

// Heralded waist maximizing the spatial prefactor: w_o1 w_p / sqrt(w_o1^2 + w_p^2).
inline double spatial_prefactor_argmax(double w_p, double w_o1) {
    if (!(w_p > 0.0) || !(w_o1 > 0.0))
        throw ConsistencyError("waists must be positive");
    return w_o1 * w_p / std::sqrt(w_o1 * w_o1 + w_p * w_p);
}

// Overlap coefficients feeding the f-ratio. The bandwidth arguments are
// wavelength FWHMs in nm at each arm's central wavelength; inside they are
// converted to angular-frequency FWHMs, which is what the dispersion terms
// pair with. theta_i is the internal idler angle.
//
// The printed source of these expressions carries typographical damage in
// s2; the repaired form used here is fixed by dimensional consistency and by
// the requirement s2 <= 2 s1 (integrability of the equivalent double-gaussian
// form of correction_f):
//   s2 = 2 L^2 D_is^2 D1^2 / a^2
//      + L^2 (w_p^4 a_s^2 + w_o1^4 (a_s + tan t_i)^2) / (w_o1^2 w_p^2 (w_p^2 + w_o1^2))
// together with the denominator reading (w_p^2 + w_o1^2). It satisfies
// s2 = 2 s1 - 2 L^2 (a_s^2 + a_s tan t_i + tan^2 t_i) / (w_p^2 + w_o1^2).
inline OverlapCoefficients overlap_coefficients(const BeamGeometry& geom,
                                                const CrystalSpec& crystal,
                                                const DispersionTerms& disp,
                                                double delta1_nm, double delta2_nm,
                                                double theta_i) {
    geom.validate();
    if (!(delta1_nm > 0.0) || !(delta2_nm > 0.0))
        throw ConsistencyError("bandwidths must be positive");
    if (!(geom.heralding_mode.central_wavelength > 0.0) ||
        !(geom.heralded_mode.central_wavelength > 0.0))
        throw ConsistencyError("collection modes need central wavelengths assigned");

    const double a2 = geom.gaussian_constant_a * geom.gaussian_constant_a;
    const double L = crystal.effective_length();
    const double L2 = L * L;
    const double D1 = bandwidth_nm_to_omega(delta1_nm, geom.heralding_mode.central_wavelength);
    const double D2 = bandwidth_nm_to_omega(delta2_nm, geom.heralded_mode.central_wavelength);
    const double u = geom.heralding_mode.waist_at_crystal * geom.heralding_mode.waist_at_crystal;
    const double p = geom.pump.waist * geom.pump.waist;
    const double v = geom.heralded_mode.waist_at_crystal * geom.heralded_mode.waist_at_crystal;
    const double al = disp.alpha_s;
    const double ti = std::tan(theta_i);
    const double Dis2 = disp.D_is * disp.D_is;

    OverlapCoefficients k;
    k.c2 = (L2 * Dis2 / a2) * (D1 * D1 * D2 * D2) / (D1 * D1 + D2 * D2);
    k.c1 = k.c2 + L2 * (p * al * al + v * ti * ti + u * (al + ti) * (al + ti)) /
                      (v * p + u * (p + v));
    k.s1 = L2 * Dis2 * D1 * D1 / a2
         + L2 * (p * p * al * al + u * u * (al + ti) * (al + ti)) / (2.0 * u * p * (p + u))
         + L2 * (al * al + al * ti + ti * ti) / (p + u);
    k.s2 = 2.0 * L2 * Dis2 * D1 * D1 / a2
         + L2 * (p * p * al * al + u * u * (al + ti) * (al + ti)) / (u * p * (p + u));
    return k;
}

struct ChiPBreakdown {
    double spatial = 0.0;
    double spectral = 0.0;
    double f_coinc = 0.0;    // f(c1, c2)
    double f_singles = 0.0;  // f(s1, s2)
    OverlapCoefficients coeffs;
    double chi_p = 0.0;
};

// Single-mode heralding efficiency chi_P: spatial prefactor x spectral factor
// Delta2/sqrt(Delta1^2+Delta2^2) (wavelength FWHMs) x f(c1,c2)/f(s1,s2).
// Values above 1 + 1e-9 signal inconsistent inputs and raise an error rather
// than being clamped.
inline ChiPBreakdown chi_p_breakdown(const BeamGeometry& geom, const CrystalSpec& crystal,
                                     const DispersionTerms& disp,
                                     double delta1_nm, double delta2_nm, double theta_i) {
    ChiPBreakdown b;
    b.coeffs = overlap_coefficients(geom, crystal, disp, delta1_nm, delta2_nm, theta_i);
    b.spatial = spatial_prefactor(geom.pump.waist, geom.heralding_mode.waist_at_crystal,
                                  geom.heralded_mode.waist_at_crystal);
    b.spectral = delta2_nm / std::sqrt(delta1_nm * delta1_nm + delta2_nm * delta2_nm);
    b.f_coinc = correction_f(b.coeffs.c1, b.coeffs.c2);
    b.f_singles = correction_f(b.coeffs.s1, b.coeffs.s2);
    b.chi_p = b.spatial * b.spectral * b.f_coinc / b.f_singles;
    if (!(b.chi_p > 0.0) || !std::isfinite(b.chi_p))
        throw ModelViolationError("chi_P evaluated to a nonpositive or non-finite value");
    if (b.chi_p > 1.0 + 1e-9)
        throw ModelViolationError("chi_P = " + format_sig(b.chi_p) +
                                  " exceeds 1: inconsistent geometry or bandwidth inputs");
    return b;
}

inline double chi_p(const BeamGeometry& geom, const CrystalSpec& crystal,
                    const DispersionTerms& disp, double delta1_nm, double delta2_nm,
                    double theta_i) {
    return chi_p_breakdown(geom, crystal, disp, delta1_nm, delta2_nm, theta_i).chi_p;
}

// Solves eta_det = chi_D / (chi_P tau_opt tau_SMF-lens) for whichever of
// {eta_det, chi_P, chi_D} is unset; exactly one must be missing.
inline EfficiencyBudget budget_solve(EfficiencyBudget b) {
    const int unknowns = static_cast<int>(!b.chi_p.has_value()) +
                         static_cast<int>(!b.chi_d.has_value()) +
                         static_cast<int>(!b.eta_det.has_value());
    if (unknowns != 1)
        throw ConsistencyError("budget_solve needs exactly one unknown among "
                               "{eta_det, chi_P, chi_D}, got " + std::to_string(unknowns));
    auto check01 = [](const char* name, double v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ConsistencyError(std::string(name) + " = " + format_sig(v) +
                                   " outside [0, 1]");
    };
    check01("tau_opt", b.tau_opt);
    check01("tau_smf_lens", b.tau_smf_lens);
    if (b.chi_p) check01("chi_p", *b.chi_p);
    if (b.chi_d) check01("chi_d", *b.chi_d);
    if (b.eta_det) check01("eta_det", *b.eta_det);

    const double tau = b.tau_opt * b.tau_smf_lens;
    if (!b.eta_det) {
        const double denom = *b.chi_p * tau;
        if (denom == 0.0) throw ConsistencyError("budget_solve: zero denominator chi_P*tau");
        b.eta_det = *b.chi_d / denom;
    } else if (!b.chi_p) {
        const double denom = *b.eta_det * tau;
        if (denom == 0.0) throw ConsistencyError("budget_solve: zero denominator eta_det*tau");
        b.chi_p = *b.chi_d / denom;
    } else {
        b.chi_d = *b.eta_det * *b.chi_p * tau;
    }
    return b;
}

struct SweepPoint {
    double w_o1 = 0.0;  // m
    double w_o2 = 0.0;  // m
    double delta1_nm = 0.0;
    double delta2_nm = 0.0;
    double chi_p = 0.0;
    bool ok = false;
    std::string error;
};

struct SweepResult {
    std::vector<double> w_o1_grid;  // m
    std::vector<double> w_o2_grid;  // m
    std::vector<SweepPoint> points;  // row-major over (w_o1, w_o2)
};

// chi_P over a waist grid at the central phase-matched point. Delta1 is
// recomputed from the geometry per heralding waist unless overridden (the
// narrow-filter configuration); Delta2 is recomputed per heralded waist.
// Failed points are recorded, not fatal.
inline SweepResult sweep_chi_p(const BeamGeometry& geom, const CrystalSpec& crystal,
                               const std::vector<double>& w_o1_grid,
                               const std::vector<double>& w_o2_grid,
                               std::optional<double> delta1_override_nm = std::nullopt,
                               const BandwidthOptions& opt = {}) {
    if (w_o1_grid.empty() || w_o2_grid.empty())
        throw ConsistencyError("sweep grids must be non-empty");
    for (double w : w_o1_grid)
        if (!(w > 0.0)) throw ConsistencyError("sweep waists must be positive");
    for (double w : w_o2_grid)
        if (!(w > 0.0)) throw ConsistencyError("sweep waists must be positive");

    const PhaseMatchSolution sol = solve_central(crystal, geom.pump,
                                                 geom.heralding_mode.external_angle);
    const double omega_p = omega_from_lambda(geom.pump.wavelength);
    const DispersionTerms disp = dispersion_terms(crystal, omega_p, sol.omega_s, sol.omega_i,
                                                  sol.theta_s_int, sol.theta_i_int);

    std::vector<double> d1(w_o1_grid.size());
    std::vector<std::string> d1_err(w_o1_grid.size());
    for (std::size_t i = 0; i < w_o1_grid.size(); ++i) {
        if (delta1_override_nm) {
            d1[i] = *delta1_override_nm;
            continue;
        }
        CollectionMode m = geom.heralding_mode;
        m.waist_at_crystal = w_o1_grid[i];
        m.central_wavelength = sol.lambda_s;
        try {
            d1[i] = extract_bandwidth(crystal, geom.pump, sol, m, Arm::heralding, opt);
        } catch (const Error& e) {
            d1_err[i] = e.what();
        }
    }
    std::vector<double> d2(w_o2_grid.size());
    std::vector<std::string> d2_err(w_o2_grid.size());
    for (std::size_t j = 0; j < w_o2_grid.size(); ++j) {
        CollectionMode m = geom.heralded_mode;
        m.waist_at_crystal = w_o2_grid[j];
        m.central_wavelength = sol.lambda_i;
        try {
            d2[j] = extract_bandwidth(crystal, geom.pump, sol, m, Arm::heralded, opt);
        } catch (const Error& e) {
            d2_err[j] = e.what();
        }
    }

    SweepResult res;
    res.w_o1_grid = w_o1_grid;
    res.w_o2_grid = w_o2_grid;
    res.points.resize(w_o1_grid.size() * w_o2_grid.size());
    for (std::size_t i = 0; i < w_o1_grid.size(); ++i) {
        for (std::size_t j = 0; j < w_o2_grid.size(); ++j) {
            SweepPoint& pt = res.points[i * w_o2_grid.size() + j];
            pt.w_o1 = w_o1_grid[i];
            pt.w_o2 = w_o2_grid[j];
            if (!d1_err[i].empty() || !d2_err[j].empty()) {
                pt.error = !d1_err[i].empty() ? d1_err[i] : d2_err[j];
                continue;
            }
            pt.delta1_nm = d1[i];
            pt.delta2_nm = d2[j];
            BeamGeometry g = geom;
            g.heralding_mode.waist_at_crystal = w_o1_grid[i];
            g.heralding_mode.central_wavelength = sol.lambda_s;
            g.heralded_mode.waist_at_crystal = w_o2_grid[j];
            g.heralded_mode.central_wavelength = sol.lambda_i;
            try {
                pt.chi_p = chi_p(g, crystal, disp, pt.delta1_nm, pt.delta2_nm, sol.theta_i_int);
                pt.ok = true;
            } catch (const Error& e) {
                pt.error = e.what();
            }
        }
    }
    return res;
}

// Gaussian-beam imaging helper: waist at the crystal produced by a thin lens
// of the given focal length placed `distance` before the crystal, fed by a
// fiber mode of the given MFD. The fiber-side distance is chosen so the image
// waist lands at the crystal; of the two conjugates the demagnified branch
// (fiber slightly beyond focus) is returned. Measured (distance, waist) pairs
// in a configuration file take precedence over this estimate.
inline double waist_from_imaging(double mfd, double focal_length, double distance,
                                 double wavelength) {
    if (!(mfd > 0.0) || !(focal_length > 0.0) || !(wavelength > 0.0))
        throw ConsistencyError("waist_from_imaging requires positive inputs");
    if (!(distance > focal_length))
        throw ConsistencyError("crystal must sit beyond the focal length");
    const double w_f = 0.5 * mfd;
    const double z_r = pi * w_f * w_f / wavelength;
    const double A = distance - focal_length;
    const double f2 = focal_length * focal_length;
    const double disc = f2 * f2 - 4.0 * A * A * z_r * z_r;
    if (disc < 0.0)
        throw NoSolutionError("no imaging solution places a waist at the requested distance");
    // object-side offset u = s - f; the larger-u conjugate is the collection
    // geometry (fiber slightly beyond focus, demagnified waist at the crystal)
    const double u = (f2 + std::sqrt(disc)) / (2.0 * A);
    return w_f * focal_length / std::sqrt(u * u + z_r * z_r);
}

}  // namespace ppsource
