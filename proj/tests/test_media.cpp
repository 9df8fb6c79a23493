#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "aggpol/media.hpp"

using namespace aggpol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MediumParams base_medium()
{
    // sigma_c = 1.3, sigma_e = 0.6, S_L = 1.9, C_m = 0.01, R = 7e-6, phi = 0.3
    return MediumParams{};
}

MediumParams swapped_medium()
{
    MediumParams p;
    p.sigma_c = 0.6;
    p.sigma_e = 1.3;
    return p;
}

void check_close(cplx got, cplx want, double rel)
{
    CAPTURE(got, want);
    REQUIRE(std::abs(got - want) <= rel * std::abs(want));
}

} // namespace

TEST_CASE("derived scalars of the default suspension", "[media]")
{
    const DerivedScalars d = derive_scalars(base_medium());
    REQUIRE_THAT(d.sigma_tilde, WithinRel(2.29, 1e-12));
    REQUIRE_THAT(d.eta, WithinRel(1.0000169793, 1e-9));
    REQUIRE_THAT(d.nu_ratio, WithinRel(13.0 / 6.0, 1e-12));
    REQUIRE_THAT(d.alpha_bar, WithinRel(1.45977e7, 1e-5));
    REQUIRE_THAT(d.gamma_bar, WithinRel(1.1192e7, 1e-4));
    REQUIRE(d.sigma_m_over_sigma_e == 0.0); // thin-membrane limit
}

TEST_CASE("derived scalars of the swapped-conductivity suspension", "[media]")
{
    const DerivedScalars d = derive_scalars(swapped_medium());
    REQUIRE_THAT(d.sigma_tilde, WithinRel(3.41, 1e-12));
    REQUIRE_THAT(d.eta, WithinRel(1.0000252803790413, 1e-13));
    REQUIRE_THAT(d.tau, WithinRel(1.3305462653288742e-07, 1e-13));
    REQUIRE_THAT(d.gamma_bar, WithinRel(7515900.096355257, 1e-13));
    REQUIRE_THAT(d.alpha_bar, WithinRel(9803100.12568077, 1e-13));
}

TEST_CASE("zero-frequency response of the default suspension", "[media]")
{
    const DerivedScalars d = derive_scalars(base_medium());
    const ComplexResponse r = response(d, 0.0);

    REQUIRE_THAT(r.alpha_p.real(), WithinRel(-1.30432, 1e-4));
    REQUIRE_THAT(r.alpha_p.imag(), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(r.kappa.real(), WithinRel(1.26087, 1e-4));
    REQUIRE_THAT(r.chi_p.real(), WithinRel(-0.310338, 1e-4));
    REQUIRE_THAT(r.sigma_eff_ratio.real(), WithinRel(0.689666, 1e-4));
    REQUIRE_THAT(r.Z_over_Ze.real(), WithinRel(1.4499805493585932, 1e-12));
}

TEST_CASE("impedance ratio at reference frequencies", "[media]")
{
    const DerivedScalars d1 = derive_scalars(base_medium());
    check_close(impedance(d1, 2.0 * pi * 1e5, 1e-3, 1e-6).second,
                {1.4433959748846058, -0.063638792153544862}, 1e-12);
    check_close(impedance(d1, 2.0 * pi * 1e7, 1e-3, 1e-6).second,
                {0.83409083499361893, -0.059524693170102018}, 1e-12);

    const DerivedScalars d2 = derive_scalars(swapped_medium());
    REQUIRE_THAT(impedance(d2, 0.0, 1e-3, 1e-6).second.real(),
                 WithinRel(1.4499910227862466, 1e-12));
    check_close(impedance(d2, 2.0 * pi * 1e5, 1e-3, 1e-6).second,
                {1.4468952914834912, -0.029359739238576491}, 1e-12);
    check_close(impedance(d2, 2.0 * pi * 1e7, 1e-3, 1e-6).second,
                {1.1709589566613708, -0.02646324212096845}, 1e-12);
}

TEST_CASE("impedance is the electrode constant over the conductivity ratio", "[media]")
{
    const DerivedScalars d = derive_scalars(base_medium());
    const double H = 2e-3, A = 4e-6;
    const double Ze = H / (d.sigma_e * A);
    for (double f : {1e3, 1e5, 1e7, 1e9}) {
        const double w = 2.0 * pi * f;
        const auto [Z, ratio] = impedance(d, w, H, A);
        check_close(Z, Ze * ratio, 1e-15);
        check_close(ratio * effective_conductivity(d, w), 1.0, 1e-14);
    }
}

TEST_CASE("polarizability splits into membrane and cytoplasm parts", "[media]")
{
    const DerivedScalars d = derive_scalars(base_medium());
    for (double w : {0.0, 1e5, 2.0 * pi * 1e7, 1e10}) {
        const auto [ap, as, a] = polarizability(d, w);
        check_close(a, ap + as, 1e-15);
    }
}

TEST_CASE("membrane part relaxes away at high frequency", "[media]")
{
    const DerivedScalars d = derive_scalars(base_medium());
    // Far above the interfacial dispersion the membranes are shorted and the
    // suspension behaves as bare cytoplasm spheres in the electrolyte.
    const cplx s = effective_conductivity(d, 2.0 * pi * 1e12);
    REQUIRE_THAT(s.real(), WithinRel(1.2072, 2e-4));
    REQUIRE_THAT(std::abs(s.imag()), WithinAbs(0.0, 1e-4));
}

TEST_CASE("empty suspension is transparent", "[media]")
{
    MediumParams p;
    p.phi = 0.0;
    const DerivedScalars d = derive_scalars(p);
    for (double w : {0.0, 1e6, 1e9}) {
        const auto [chi_p, chi_s] = susceptibilities(d, w);
        REQUIRE(std::abs(chi_p) <= 1e-15);
        REQUIRE(std::abs(chi_s) <= 1e-15);
        check_close(effective_conductivity(d, w), 1.0, 1e-15);
        check_close(effective_conductivity_pairwise(d, w), 1.0, 1e-15);
    }
}

TEST_CASE("pairwise correction has the closed O(phi^2) form", "[media]")
{
    MediumParams p;
    for (double phi : {0.01, 0.1, 0.3}) {
        p.phi = phi;
        const DerivedScalars d = derive_scalars(p);
        for (double w : {0.0, 2.0 * pi * 1e7}) {
            const cplx dilute = effective_conductivity(d, w);
            const cplx pair = effective_conductivity_pairwise(d, w);
            const cplx X = dilute - 1.0;
            check_close(pair - dilute, X * X / (3.0 - X), 1e-12);
        }
    }
}

TEST_CASE("permittivity follows the susceptibility chain", "[media]")
{
    const DerivedScalars d = derive_scalars(base_medium());
    const double w = 2.0 * pi * 1e6;
    const ComplexResponse r = response(d, w);
    const cplx expected = d.sigma_e * (r.sigma_eff_ratio - 1.0) / (cplx(0.0, w) * eps0);
    check_close(r.eps_star, expected, 1e-14);
    // EE convention: eps'' = -Im eps* is positive (lossy) through the dispersion.
    REQUIRE(r.eps_star.real() > 0.0);
    REQUIRE_THROWS_AS(complex_permittivity(d, 0.0), parameter_error);
}

TEST_CASE("finite membrane thickness adds a leak conductance", "[media]")
{
    MediumParams p;
    p.h = 5e-9;
    const DerivedScalars d = derive_scalars(p);
    REQUIRE(d.sigma_m_over_sigma_e > 0.0);

    // No lateral conductance means no leak regardless of thickness.
    p.S_L = 0.0;
    const DerivedScalars d0 = derive_scalars(p);
    REQUIRE(d0.eta == 1.0);
    REQUIRE(d0.sigma_m_over_sigma_e == 0.0);

    // The leak raises the DC conductivity towards the shorted-membrane value.
    p.S_L = 1.9;
    const double with_leak = effective_conductivity(d, 0.0).real();
    MediumParams thin;
    const double without = effective_conductivity(derive_scalars(thin), 0.0).real();
    REQUIRE(with_leak > without);
}

TEST_CASE("parameter validation rejects unphysical media", "[media]")
{
    MediumParams p;
    p.sigma_e = 0.0;
    REQUIRE_THROWS_AS(derive_scalars(p), parameter_error);
    p = MediumParams{};
    p.phi = 1.0;
    REQUIRE_THROWS_AS(derive_scalars(p), parameter_error);
    p = MediumParams{};
    p.R = -1e-6;
    REQUIRE_THROWS_AS(derive_scalars(p), parameter_error);
    p = MediumParams{};
    REQUIRE_THROWS_AS(polarizability(derive_scalars(p), -1.0), parameter_error);
}
