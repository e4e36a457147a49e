#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "ppsource/sellmeier.hpp"
#include "ppsource/units.hpp"

using namespace ppsource;

namespace {

SellmeierSet default_set() {
    return load_sellmeier_file(std::string(PPSOURCE_DATA_DIR) + "/lithium_niobate_e.json");
}

// Standalone evaluator of the published coefficient polynomial, written
// directly from the data file values; deliberately independent of the
// library's evaluation path.
double reference_ne(double lam_um, double T) {
    const double f = (T - 24.5) * (T + 570.82);
    const double l2 = lam_um * lam_um;
    const double pole = 0.20692 + (-0.89e-8) * f;
    const double n2 = 5.35583 + 4.629e-7 * f
                    + (0.100473 + 3.862e-8 * f) / (l2 - pole * pole)
                    + (100.0 + 2.657e-5 * f) / (l2 - 11.34927 * 11.34927)
                    - 0.015334 * l2;
    return std::sqrt(n2);
}

}  // namespace

TEST_CASE("default set reproduces the independent evaluator") {
    const auto set = default_set();
    for (const double lam : {450.0, 532.0, 810.0, 1064.0, 1550.0, 3000.0}) {
        for (const double T : {24.5, 90.0, 131.0, 200.0}) {
            CHECK(refractive_index(lam, T, set) ==
                  Catch::Approx(reference_ne(lam * 1e-3, T)).epsilon(1e-13));
        }
    }
    // frozen spot values
    CHECK(refractive_index(1550.0, 131.0, set) == Catch::Approx(2.142558578151445).epsilon(1e-12));
    CHECK(refractive_index(810.0, 131.0, set) == Catch::Approx(2.1801361839152853).epsilon(1e-12));
    CHECK(refractive_index(1064.0, 24.5, set) == Catch::Approx(2.1557974335465007).epsilon(1e-12));
}

TEST_CASE("normal dispersion: index decreases toward longer wavelengths") {
    const auto set = default_set();
    CHECK(refractive_index(810.0, 131.0, set) > refractive_index(1550.0, 131.0, set));
}

TEST_CASE("constant test set returns its index exactly") {
    const auto set = constant_index_set(2.0);
    CHECK(refractive_index(700.0, 25.0, set) == 2.0);
    CHECK(refractive_index(2000.0, 180.0, set) == 2.0);
}

TEST_CASE("index is continuous in wavelength") {
    const auto set = default_set();
    const double n0 = refractive_index(900.0, 131.0, set);
    double delta = 1.0;  // nm
    double prev_gap = std::abs(refractive_index(900.0 + delta, 131.0, set) - n0);
    for (int k = 0; k < 6; ++k) {
        delta /= 10.0;
        const double gap = std::abs(refractive_index(900.0 + delta, 131.0, set) - n0);
        CHECK(gap <= prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-9);
}

TEST_CASE("out-of-range inputs name the violated bound") {
    const auto set = default_set();
    CHECK_THROWS_WITH(refractive_index(300.0, 131.0, set),
                      Catch::Matchers::ContainsSubstring("400"));
    CHECK_THROWS_WITH(refractive_index(6000.0, 131.0, set),
                      Catch::Matchers::ContainsSubstring("5000"));
    CHECK_THROWS_WITH(refractive_index(810.0, 300.0, set),
                      Catch::Matchers::ContainsSubstring("250"));
    CHECK_THROWS_AS(refractive_index(300.0, 131.0, set), RangeError);
}

TEST_CASE("group term at the range boundary is rejected") {
    const auto set = default_set();
    CHECK_THROWS_AS(group_term(400.0, 131.0, set), RangeError);
    CHECK_THROWS_AS(group_term(5000.0, 131.0, set), RangeError);
    CHECK_NOTHROW(group_term(400.5, 131.0, set));
}

TEST_CASE("constant set: group term equals n/c") {
    const auto set = constant_index_set(2.0);
    CHECK(group_term(810.0, 25.0, set) == Catch::Approx(2.0 / speed_of_light).epsilon(1e-15));
}

TEST_CASE("analytic group term matches a central finite difference") {
    const auto set = default_set();
    // d(n w / c)/dw by central difference on the library's own index values
    auto fd = [&](double lam_nm, double T) {
        const double w = omega_from_lambda(nm_to_m(lam_nm));
        const double h = 1e-5 * w;
        auto nw = [&](double omega) {
            return refractive_index(m_to_nm(lambda_from_omega(omega)), T, set) * omega;
        };
        return (nw(w + h) - nw(w - h)) / (2.0 * h) / speed_of_light;
    };
    for (double lam = 450.0; lam <= 4500.0; lam += 150.0) {
        const double analytic = group_term(lam, 131.0, set);
        CHECK(analytic == Catch::Approx(fd(lam, 131.0)).epsilon(1e-6));
    }
    // frozen spot values
    CHECK(group_term(810.0, 131.0, set) == Catch::Approx(7.569394203065027e-9).epsilon(1e-10));
    CHECK(group_term(1550.0, 131.0, set) == Catch::Approx(7.297449548670232e-9).epsilon(1e-10));
}

TEST_CASE("evaluation is pure: repeated calls are bit-identical") {
    const auto set = default_set();
    const double a = refractive_index(1234.5, 77.0, set);
    const double b = refractive_index(1234.5, 77.0, set);
    CHECK(a == b);
}

TEST_CASE("set validation rejects malformed documents") {
    auto j = nlohmann::json::parse(R"({
        "name": "broken", "form": "temperature_two_pole",
        "coefficients": [1.0, 2.0],
        "temperature_model": [0, 0, 0, 0, 0, 0],
        "valid_wavelength_nm": [400, 5000],
        "valid_temperature_C": [20, 250]})");
    CHECK_THROWS_AS(sellmeier_from_json(j), ConsistencyError);

    auto j2 = nlohmann::json::parse(R"({
        "name": "broken2", "form": "no_such_form",
        "coefficients": [1.0],
        "valid_wavelength_nm": [400, 5000],
        "valid_temperature_C": [20, 250]})");
    CHECK_THROWS_AS(sellmeier_from_json(j2), IoError);

    CHECK_THROWS_AS(load_sellmeier_file("/nonexistent/file.json"), IoError);
}
