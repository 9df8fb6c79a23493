#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "aggpol/special.hpp"

using namespace aggpol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("log_gamma matches lgamma on the real axis", "[special]")
{
    for (double x : {0.1, 0.7, 1.0, 1.5, 5.054, 7.3, 20.0}) {
        const std::complex<double> lg = special::log_gamma({x, 0.0});
        REQUIRE_THAT(lg.real(), WithinAbs(std::lgamma(x), 1e-12 * (1.0 + std::abs(std::lgamma(x)))));
        REQUIRE_THAT(lg.imag(), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("log_gamma satisfies the recurrence Gamma(z+1) = z Gamma(z)", "[special]")
{
    const std::complex<double> zs[] = {{0.3, 1.2}, {-1.3, 0.7}, {-4.2, -2.5}, {2.0, 3.0}};
    for (const auto& z : zs) {
        const std::complex<double> lhs = std::exp(special::log_gamma(z + 1.0));
        const std::complex<double> rhs = z * std::exp(special::log_gamma(z));
        REQUIRE(std::abs(lhs - rhs) <= 1e-11 * std::abs(rhs));
    }
}

TEST_CASE("log_gamma rejects the poles", "[special]")
{
    REQUIRE_THROWS_AS(special::log_gamma({0.0, 0.0}), parameter_error);
    REQUIRE_THROWS_AS(special::log_gamma({-3.0, 0.0}), parameter_error);
}

TEST_CASE("gamma_abs2 reference values", "[special]")
{
    // |Gamma(x+iy)|^2 against high-precision references.
    struct Ref { double x, y, val; };
    const Ref refs[] = {
        {2.0, 3.0, 0.015211500791890125},
        {5.054, 0.0, 678.17895655034989},
        {0.8, 0.3, 1.1125952767071305},
        {12.5, 2.25, 12313752649916531.0},
        {1.1, 0.05, 0.9018331237688393},
        {7.2350694650061334, 0.80179803323537851, 1146585.4334836995},
    };
    for (const auto& r : refs)
        REQUIRE_THAT(special::gamma_abs2(r.x, r.y), WithinRel(r.val, 5e-12));
}

TEST_CASE("Gauss-Kronrod quadrature on smooth integrands", "[special]")
{
    const double third = special::integrate_gk15([](double x) { return x * x; }, 0.0, 1.0);
    REQUIRE_THAT(third, WithinRel(1.0 / 3.0, 1e-14));

    const double two = special::integrate_gk15([](double x) { return std::sin(x); }, 0.0, pi);
    REQUIRE_THAT(two, WithinRel(2.0, 1e-13));

    // Same tail window the Mittag-Leffler evaluator uses.
    const double halfpi = special::integrate_gk15(
        [](double w) { return std::exp(-w * w); }, 0.0, std::sqrt(60.0));
    REQUIRE_THAT(halfpi, WithinRel(std::sqrt(pi) / 2.0, 1e-12));
}

TEST_CASE("Gauss-Kronrod quadrature refines a narrow peak", "[special]")
{
    // exp(-1000 (x-1/2)^2) integrated over [0,1]; tails are ~1e-109.
    const double v = special::integrate_gk15(
        [](double x) {
            const double d = x - 0.5;
            return std::exp(-1000.0 * d * d);
        },
        0.0, 1.0);
    REQUIRE_THAT(v, WithinRel(std::sqrt(pi / 1000.0), 1e-10));
}
