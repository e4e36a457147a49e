#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "ppsource/phasematching.hpp"
#include "ppsource/rng.hpp"
#include "ppsource/units.hpp"

using namespace ppsource;

namespace {

CrystalSpec default_crystal() {
    CrystalSpec c;
    c.length = 5e-3;
    c.poling_period = 7.36e-6;
    c.temperature = 131.0;
    c.sellmeier = load_sellmeier_file(std::string(PPSOURCE_DATA_DIR) + "/lithium_niobate_e.json");
    return c;
}

PumpSpec default_pump() {
    PumpSpec p;
    p.wavelength = nm_to_m(532.0);
    p.waist = 144e-6;
    return p;
}

}  // namespace

TEST_CASE("sinc_sq profile: unit peak, series region, half power, first zero") {
    CHECK(sinc_sq(0.0) == 1.0);
    // series joins the direct evaluation smoothly
    CHECK(sinc_sq(9.9e-7) == Catch::Approx(sinc_sq(1.01e-6)).epsilon(1e-9));
    // half-power point of sinc^2 sits at 1.39156
    const double x_half = brent_root([](double x) { return sinc_sq(x) - 0.5; }, 1.0, 2.0);
    CHECK(x_half == Catch::Approx(1.39156).margin(1e-4));
    CHECK(sinc_sq(1.39156) == Catch::Approx(0.5).margin(1e-4));
    CHECK(sinc_sq(pi) == Catch::Approx(0.0).margin(1e-30));
}

TEST_CASE("delta_k vanishes transversally on axis and is reproduced independently") {
    const auto crystal = default_crystal();
    const auto pump = default_pump();
    const double ws = omega_from_lambda(nm_to_m(810.0));

    const auto on_axis = delta_k(crystal, pump, ws, 0.0, 0.0);
    CHECK(on_axis.dk_x == 0.0);
    CHECK(on_axis.dk_y == 0.0);

    // independent re-evaluation from the same index values, nominal geometry:
    // 532 -> 810 + conjugate, internal angles refracted from 1 and 2 degrees
    const double T = crystal.temperature;
    const double lam_s = 810.0;
    const double wp = omega_from_lambda(pump.wavelength);
    const double wi = wp - ws;
    const double lam_i = m_to_nm(lambda_from_omega(wi));
    const double n_p = refractive_index(532.0, T, crystal.sellmeier);
    const double n_s = refractive_index(lam_s, T, crystal.sellmeier);
    const double n_i = refractive_index(lam_i, T, crystal.sellmeier);
    const double th_s = std::asin(std::sin(deg_to_rad(1.0)) / n_s);
    const double th_i = std::asin(std::sin(deg_to_rad(2.0)) / n_i);
    const double ref_dkz = n_p * wp / speed_of_light - n_s * ws * std::cos(th_s) / speed_of_light -
                           n_i * wi * std::cos(th_i) / speed_of_light -
                           2.0 * pi / crystal.poling_period;
    const double ref_dkx = n_s * ws * std::sin(th_s) / speed_of_light -
                           n_i * wi * std::sin(th_i) / speed_of_light;
    const auto d = delta_k(crystal, pump, ws, th_s, th_i);
    CHECK(d.dk_z == Catch::Approx(ref_dkz).epsilon(1e-12));
    CHECK(d.dk_x == Catch::Approx(ref_dkx).epsilon(1e-12));
}

TEST_CASE("delta_k rejects signal at or above the pump frequency") {
    const auto crystal = default_crystal();
    const auto pump = default_pump();
    CHECK_THROWS_AS(delta_k(crystal, pump, omega_from_lambda(nm_to_m(500.0)), 0.0, 0.0),
                    DomainError);
}

TEST_CASE("phi: normalized peak and sinc zeros at the kernel arguments") {
    const auto crystal = default_crystal();
    const auto pump = default_pump();
    const auto sol = solve_central(crystal, pump, deg_to_rad(1.0));

    // at the solver fixed point the function reaches its unit peak
    CHECK(phi(crystal, pump, sol.omega_s, sol.theta_s_int, sol.theta_i_int) ==
          Catch::Approx(1.0).margin(1e-9));

    // synthetic crystal with a poling period detuned to put the sinc argument
    // dk_z L / 2 at chosen values
    auto probe_phi_at = [&](double target_arg) {
        CrystalSpec c = crystal;
        const double L = c.effective_length();
        const auto d0 = delta_k(crystal, pump, sol.omega_s, sol.theta_s_int, sol.theta_i_int);
        // shift 2 pi / Lambda so dk_z = 2 * target / L
        const double want_dkz = 2.0 * target_arg / L;
        const double new_inv = 2.0 * pi / c.poling_period - (want_dkz - d0.dk_z);
        c.poling_period = 2.0 * pi / new_inv;
        return phi(c, pump, sol.omega_s, sol.theta_s_int, sol.theta_i_int);
    };
    CHECK(probe_phi_at(pi) == Catch::Approx(0.0).margin(1e-25));
    CHECK(probe_phi_at(1.39156) == Catch::Approx(0.5).margin(1e-4));
}

TEST_CASE("phi never exceeds one over random kinematics") {
    const auto crystal = default_crystal();
    const auto pump = default_pump();
    SplitMix64 g(20240817);
    for (int k = 0; k < 500; ++k) {
        const double lam_s = 700.0 + 1200.0 * g.uniform01();
        const double ths = 0.05 * g.uniform01();
        const double thi = 0.05 * g.uniform01();
        const double v = phi(crystal, pump, omega_from_lambda(nm_to_m(lam_s)), ths, thi);
        REQUIRE(v <= 1.0 + 1e-12);
        REQUIRE(v >= 0.0);
    }
}

TEST_CASE("solve_central: default configuration operating point") {
    const auto crystal = default_crystal();
    const auto pump = default_pump();
    const auto sol = solve_central(crystal, pump, deg_to_rad(1.0));

    // frozen model truth for the shipped coefficient set at 131 C
    CHECK(m_to_nm(sol.lambda_s) == Catch::Approx(786.5893235574276).epsilon(1e-9));
    CHECK(m_to_nm(sol.lambda_i) == Catch::Approx(1643.688408788118).epsilon(1e-9));
    CHECK(rad_to_deg(sol.theta_i_ext) == Catch::Approx(2.089997237075817).epsilon(1e-9));

    // the conjugate arm exits near the nominal 2 degrees
    CHECK(rad_to_deg(sol.theta_i_ext) > 1.5);
    CHECK(rad_to_deg(sol.theta_i_ext) < 2.5);

    // solver contract
    CHECK(std::abs(sol.residual_dkz) * crystal.effective_length() < 1e-6);
    // energy conservation in vacuum wavelengths
    CHECK(1.0 / sol.lambda_s + 1.0 / sol.lambda_i ==
          Catch::Approx(1.0 / pump.wavelength).epsilon(1e-9));

    // round trip through delta_k
    const auto d = delta_k(crystal, pump, sol.omega_s, sol.theta_s_int, sol.theta_i_int);
    CHECK(std::abs(d.dk_z) * crystal.effective_length() < 1e-6);
    CHECK(std::abs(d.dk_x) < 1e-6);
}

TEST_CASE("solve_central: nominal pair recovered at room temperature") {
    // the shipped undoped-crystal coefficients place the 532 -> 810 + 1550
    // operating point at 25 C rather than at the elevated temperature the
    // doped experiment used
    auto crystal = default_crystal();
    crystal.temperature = 25.0;
    const auto sol = solve_central(crystal, default_pump(), deg_to_rad(1.0));
    CHECK(m_to_nm(sol.lambda_s) == Catch::Approx(810.0).margin(15.0));
    CHECK(rad_to_deg(sol.theta_i_ext) == Catch::Approx(2.0).margin(0.5));
}

TEST_CASE("solve_central: degenerate collinear point by construction") {
    // dispersive set; the poling period is chosen so that collinear degenerate
    // quasi-phase matching holds exactly at twice the pump wavelength
    CrystalSpec c = default_crystal();
    const PumpSpec pump = default_pump();
    const double T = c.temperature;
    const double k_p = refractive_index(532.0, T, c.sellmeier) *
                       omega_from_lambda(pump.wavelength) / speed_of_light;
    const double k_s = refractive_index(1064.0, T, c.sellmeier) *
                       omega_from_lambda(nm_to_m(1064.0)) / speed_of_light;
    c.poling_period = 2.0 * pi / (k_p - 2.0 * k_s);
    const auto sol = solve_central(c, pump, 0.0);
    CHECK(m_to_nm(sol.lambda_s) == Catch::Approx(1064.0).epsilon(1e-9));
    CHECK(m_to_nm(sol.lambda_i) == Catch::Approx(1064.0).epsilon(1e-9));
    CHECK(sol.theta_i_int == Catch::Approx(0.0).margin(1e-12));
    CHECK(std::abs(sol.residual_dkz) * c.effective_length() < 1e-6);
}

TEST_CASE("solve_central: no root reports bracketing diagnostics") {
    CrystalSpec c = default_crystal();
    c.poling_period = 0.5e-6;  // grating momentum far beyond any mismatch
    CHECK_THROWS_AS(solve_central(c, default_pump(), deg_to_rad(1.0)), NoSolutionError);
    CHECK_THROWS_WITH(solve_central(c, default_pump(), deg_to_rad(1.0)),
                      Catch::Matchers::ContainsSubstring("dk_z spans"));
}

TEST_CASE("angular_fwhm closed form and scaling") {
    CollectionMode m;
    m.mfd = 3.9e-6;
    m.waist_at_crystal = 82e-6;
    m.central_wavelength = nm_to_m(810.0);
    const double dth = angular_fwhm(m);
    CHECK(dth == Catch::Approx(0.005235570596358816).epsilon(1e-12));

    // doubling the waist halves the acceptance
    CollectionMode m2 = m;
    m2.waist_at_crystal *= 2.0;
    CHECK(angular_fwhm(m2) == Catch::Approx(0.5 * dth).epsilon(1e-12));

    CollectionMode m3;
    m3.mfd = 5.6e-6;
    m3.waist_at_crystal = 158e-6;
    m3.central_wavelength = nm_to_m(1550.0);
    CHECK(angular_fwhm(m3) == Catch::Approx(0.005199570423481838).epsilon(1e-12));
}

TEST_CASE("extract_bandwidth: heralding arm against frozen operating values") {
    const auto crystal = default_crystal();
    const auto pump = default_pump();
    const auto sol = solve_central(crystal, pump, deg_to_rad(1.0));

    CollectionMode m;
    m.mfd = 3.9e-6;
    m.waist_at_crystal = 82e-6;
    const double d82 = extract_bandwidth(crystal, pump, sol, m, Arm::heralding);
    CHECK(d82 == Catch::Approx(2.3930395193504372).margin(2e-3));

    m.waist_at_crystal = 105e-6;
    const double d105 = extract_bandwidth(crystal, pump, sol, m, Arm::heralding);
    CHECK(d105 == Catch::Approx(2.1505741118746924).margin(2e-3));

    m.waist_at_crystal = 132e-6;
    const double d132 = extract_bandwidth(crystal, pump, sol, m, Arm::heralding);
    CHECK(d132 == Catch::Approx(1.973838179611609).margin(2e-3));

    // a tighter collection mode never widens the selected band
    CHECK(d82 > d105);
    CHECK(d105 > d132);
}

TEST_CASE("extract_bandwidth: heralded arm frozen values") {
    const auto crystal = default_crystal();
    const auto pump = default_pump();
    const auto sol = solve_central(crystal, pump, deg_to_rad(1.0));

    CollectionMode m;
    m.mfd = 5.6e-6;
    m.waist_at_crystal = 158e-6;
    CHECK(extract_bandwidth(crystal, pump, sol, m, Arm::heralded) ==
          Catch::Approx(7.741135060683746).margin(5e-3));
    m.waist_at_crystal = 197e-6;
    CHECK(extract_bandwidth(crystal, pump, sol, m, Arm::heralded) ==
          Catch::Approx(7.253349896306993).margin(5e-3));
}

TEST_CASE("extract_bandwidth converges under bracket-step refinement") {
    const auto crystal = default_crystal();
    const auto pump = default_pump();
    const auto sol = solve_central(crystal, pump, deg_to_rad(1.0));
    CollectionMode m;
    m.mfd = 3.9e-6;
    m.waist_at_crystal = 82e-6;

    BandwidthOptions coarse;
    coarse.coarse_step_nm = 0.2;
    BandwidthOptions fine;
    fine.coarse_step_nm = 0.04;  // below delta / 50
    const double a = extract_bandwidth(crystal, pump, sol, m, Arm::heralding, coarse);
    const double b = extract_bandwidth(crystal, pump, sol, m, Arm::heralding, fine);
    CHECK(a == Catch::Approx(b).margin(1e-3));
}

TEST_CASE("snell conversions invert each other") {
    const double n = 2.18;
    for (double ext = 0.0; ext < 0.2; ext += 0.027) {
        CHECK(snell_external(snell_internal(ext, n), n) == Catch::Approx(ext).epsilon(1e-12));
    }
}
