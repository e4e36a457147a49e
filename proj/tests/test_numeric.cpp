#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ppsource/numeric.hpp"

using namespace ppsource;

TEST_CASE("brent_root finds simple roots") {
    const double r = brent_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
    CHECK(std::abs(std::cos(r) - r) < 1e-12);

    const double r2 = brent_root([](double x) { return x * x * x - 2.0; }, 0.0, 2.0);
    CHECK(r2 == Catch::Approx(std::cbrt(2.0)).epsilon(1e-12));
}

TEST_CASE("brent_root rejects non-bracketing endpoints") {
    CHECK_THROWS_AS(brent_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), NumericError);
}

TEST_CASE("golden_max locates a quadratic maximum") {
    const double x = golden_max([](double t) { return -(t - 0.3) * (t - 0.3); }, -1.0, 1.0, 1e-9);
    CHECK(x == Catch::Approx(0.3).margin(1e-7));
}

TEST_CASE("adaptive quadrature matches closed forms") {
    const double i1 = integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(i1 == Catch::Approx(1.0 / 3.0).epsilon(1e-12));

    const double i2 = integrate_adaptive([](double x) { return std::sin(x); }, 0.0,
                                         3.14159265358979323846);
    CHECK(i2 == Catch::Approx(2.0).epsilon(1e-10));

    // gaussian against erf
    const double i3 = integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, 3.0);
    CHECK(i3 == Catch::Approx(std::sqrt(3.14159265358979323846) / 2.0 * std::erf(3.0))
                    .epsilon(1e-10));
}

TEST_CASE("adaptive quadrature is deterministic") {
    auto f = [](double x) { return std::exp(-2.0 * x) * std::cos(10.0 * x); };
    const double a = integrate_adaptive(f, 0.0, 5.0);
    const double b = integrate_adaptive(f, 0.0, 5.0);
    CHECK(a == b);
}

TEST_CASE("adaptive quadrature rejects non-finite integrands") {
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / (x - 0.5); }, 0.0, 1.0),
                    NumericError);
}
