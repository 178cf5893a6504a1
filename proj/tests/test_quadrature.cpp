#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ccds/quadrature.hpp"

using namespace ccds;

TEST_CASE("adaptive Simpson reproduces known integrals") {
    QuadratureControl ctl;
    ctl.relTol = 1e-12;

    CHECK(integrate([](double x) { return x * x; }, 0.0, 3.0, ctl) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 10.0, ctl) ==
          doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI, ctl) ==
          doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("breakpoints recover full accuracy for piecewise-smooth integrands") {
    auto kinked = [](double x) { return x < 1.0 ? x : 2.0 - x; }; // triangle on [0,2]
    QuadratureControl ctl;
    ctl.relTol = 1e-13;
    const double brk[1] = {1.0};
    const double withBrk = integrate(kinked, 0.0, 2.0, ctl, std::span<const double>(brk, 1));
    CHECK(withBrk == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("vector integrand shares nodes across components") {
    QuadratureControl ctl;
    ctl.relTol = 1e-12;
    const auto r = integrateVec<2>(
        [](double x) -> std::array<double, 2> {
            return {std::exp(x), std::exp(-x)};
        },
        0.0, 1.0, ctl);
    CHECK(r[0] == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("halving the tolerance moves the result by less than the error target") {
    auto f = [](double x) { return std::exp(-0.3 * x) * (1.0 + std::sin(3.0 * x)); };
    QuadratureControl loose;
    loose.relTol = 1e-8;
    QuadratureControl tight;
    tight.relTol = 5e-9;
    const double a = integrate(f, 0.0, 7.0, loose);
    const double b = integrate(f, 0.0, 7.0, tight);
    CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
}

TEST_CASE("degenerate and invalid ranges") {
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("cumulative integral matches direct integration at scattered queries") {
    auto f = [](double x) { return 0.03 * std::exp(0.05 * x) / (1.0 + 0.02 * x); };
    CumulativeIntegral<decltype(f)> cum(f, 20.0, {}, 1e-12);
    QuadratureControl ctl;
    ctl.relTol = 0.0;
    ctl.absTol = 1e-14;
    for (double x : {13.7, 0.3, 19.99, 5.5, 0.0, 20.0, 2.25}) {
        const double direct = integrate(f, 0.0, x, ctl);
        CHECK(std::abs(cum(x) - direct) <= 1e-11);
    }
}
