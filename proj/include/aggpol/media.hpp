#ifndef AGGPOL_MEDIA_HPP
#define AGGPOL_MEDIA_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <tuple>

#include "aggpol/errors.hpp"

namespace aggpol {

using cplx = std::complex<double>;

inline constexpr double eps0 = 8.854e-12; // vacuum permittivity, F/m
inline constexpr double pi = 3.14159265358979323846;

// ============================================================================
//  Medium description
// ============================================================================

/// Physical parameters of the cell suspension.  SI units throughout.
struct MediumParams {
    double sigma_c = 1.3;  ///< cytoplasm conductivity, S/m
    double sigma_e = 0.6;  ///< extracellular conductivity, S/m
    double S_L = 1.9;      ///< membrane surface conductance, S/m^2
    double C_m = 0.01;     ///< membrane surface capacitance, F/m^2
    double R = 7e-6;       ///< cell radius, m
    double phi = 0.3;      ///< volume fraction
    std::optional<double> h{}; ///< membrane thickness, m; absent = thin-membrane limit

    /// Volume fraction used by the aggregation closure when it differs from
    /// the one entering the medium scalars (scaled-tumor bookkeeping);
    /// absent = same as phi.
    std::optional<double> phi_box{};

    void validate() const
    {
        if (!(sigma_c > 0.0) || !(sigma_e > 0.0))
            throw parameter_error("MediumParams: conductivities must be positive");
        if (!(S_L >= 0.0))
            throw parameter_error("MediumParams: S_L must be non-negative");
        if (!(C_m > 0.0))
            throw parameter_error("MediumParams: C_m must be positive");
        if (!(R > 0.0))
            throw parameter_error("MediumParams: R must be positive");
        if (!(phi >= 0.0 && phi < 1.0))
            throw parameter_error("MediumParams: phi must lie in [0, 1)");
        if (h && !(*h > 0.0))
            throw parameter_error("MediumParams: membrane thickness must be positive when given");
        if (phi_box && !(*phi_box >= 0.0 && *phi_box < 1.0))
            throw parameter_error("MediumParams: phi_box must lie in [0, 1)");
    }
};

/// Scalars derived once per medium; everything downstream consumes these.
struct DerivedScalars {
    double sigma_c = 0.0;
    double sigma_e = 0.0;
    double phi = 0.0;
    double sigma_tilde = 0.0;         ///< 2σe + σc + φ(σe − σc), S/m
    double eta = 0.0;                 ///< membrane-leak factor, ≥ 1
    double tau = 0.0;                 ///< interfacial relaxation time, s
    double nu_ratio = 0.0;            ///< σc/σe
    double alpha_bar = 0.0;           ///< single-cell forcing rate, S/F
    double gamma_bar = 0.0;           ///< single-cell relaxation rate, S/F
    double sigma_m_over_sigma_e = 0.0;///< 0 in the thin-membrane limit
};

inline DerivedScalars derive_scalars(const MediumParams& p)
{
    p.validate();

    DerivedScalars d;
    d.sigma_c = p.sigma_c;
    d.sigma_e = p.sigma_e;
    d.phi = p.phi;
    d.sigma_tilde = 2.0 * p.sigma_e + p.sigma_c + p.phi * (p.sigma_e - p.sigma_c);
    if (!(d.sigma_tilde > 0.0))
        throw parameter_error("derive_scalars: sigma_tilde must be positive");

    const double denom = (2.0 + p.phi) * p.sigma_c * p.sigma_e;
    d.eta = 1.0 + p.S_L * p.R * d.sigma_tilde / denom;
    d.tau = p.C_m * p.R * d.sigma_tilde / denom;
    d.nu_ratio = p.sigma_c / p.sigma_e;
    d.alpha_bar = 3.0 / ((2.0 + p.phi) * d.tau);
    d.gamma_bar = d.eta / d.tau;
    if (p.h)
        d.sigma_m_over_sigma_e =
            (*p.h / p.R) * (2.0 + p.phi) * p.sigma_c * (d.eta - 1.0) / d.sigma_tilde;
    return d;
}

// ============================================================================
//  Frequency response
// ============================================================================

/// All complex response quantities at a single angular frequency.
struct ComplexResponse {
    double omega = 0.0;
    cplx alpha_p, alpha_s, alpha;
    cplx kappa;
    cplx chi_p, chi_s;
    cplx sigma_eff_ratio;
    cplx eps_star;
    cplx Z_over_Ze;
};

/// Polarizability pair (membrane-borne and cytoplasm-borne) plus their sum.
inline std::tuple<cplx, cplx, cplx> polarizability(const DerivedScalars& d, double omega)
{
    if (!(omega >= 0.0))
        throw parameter_error("polarizability: omega must be non-negative");
    const cplx den(d.eta, omega * d.tau);
    const cplx alpha_p = -3.0 / ((2.0 + d.phi) * den);
    const cplx alpha_s =
        -3.0 * (d.sigma_e - d.sigma_c) / d.sigma_tilde * (den - 1.0) / den;
    return {alpha_p, alpha_s, alpha_p + alpha_s};
}

/// Local-field factor κ; the mean matrix field is E = κ⁻¹ E_ext.
inline cplx local_field_factor(const DerivedScalars& d, double omega)
{
    if (!(omega >= 0.0))
        throw parameter_error("local_field_factor: omega must be non-negative");
    const cplx den(d.eta, omega * d.tau);
    return ((2.0 + 3.0 * d.phi) * d.sigma_e + d.sigma_c) / d.sigma_tilde
           - 3.0 * d.phi * d.phi * d.sigma_c / ((2.0 + d.phi) * d.sigma_tilde * den);
}

/// Aggregate susceptibilities χ_p = φα_p/κ, χ_s = φα_s/κ.
inline std::pair<cplx, cplx> susceptibilities(const DerivedScalars& d, double omega)
{
    const auto [alpha_p, alpha_s, alpha] = polarizability(d, omega);
    (void)alpha;
    const cplx kappa = local_field_factor(d, omega);
    if (std::abs(kappa) == 0.0)
        throw singular_error("susceptibilities: local-field factor vanished");
    return {d.phi * alpha_p / kappa, d.phi * alpha_s / kappa};
}

/// σ̄/σ_e of the suspension, first-order (dilute) homogenization.
inline cplx effective_conductivity(const DerivedScalars& d, double omega)
{
    const auto [chi_p, chi_s] = susceptibilities(d, omega);
    return 1.0 + chi_s + (1.0 - d.sigma_m_over_sigma_e) * chi_p;
}

/// σ̄/σ_e including the pairwise O(φ²) correction for random suspensions.
inline cplx effective_conductivity_pairwise(const DerivedScalars& d, double omega)
{
    const auto [chi_p, chi_s] = susceptibilities(d, omega);
    // With X = 3φθ₁ the correction term 3φ²θ₁²/(1−φθ₁) reduces to X²/(3−X).
    const cplx X = chi_s + (1.0 - d.sigma_m_over_sigma_e) * chi_p;
    if (std::abs(3.0 - X) == 0.0)
        throw singular_error("effective_conductivity_pairwise: phi*theta1 reached unity");
    return 1.0 + X + X * X / (3.0 - X);
}

/// Excess complex relative permittivity ε* = ε′ − jε″ of the suspension.
inline cplx complex_permittivity(const DerivedScalars& d, double omega)
{
    if (!(omega > 0.0))
        throw parameter_error("complex_permittivity: undefined at omega = 0");
    const auto [chi_p, chi_s] = susceptibilities(d, omega);
    const cplx jw(0.0, omega);
    return d.sigma_e * ((1.0 - d.sigma_m_over_sigma_e) * chi_p + chi_s) / (jw * eps0);
}

/// Measured impedance of an H × A_el electrode column filled with suspension.
inline std::pair<cplx, cplx> impedance(const DerivedScalars& d, double omega,
                                       double H, double A_el)
{
    if (!(H > 0.0) || !(A_el > 0.0))
        throw parameter_error("impedance: electrode geometry must be positive");
    const cplx sigma_ratio = effective_conductivity(d, omega);
    const double Ze = H / (d.sigma_e * A_el);
    const cplx Z_over_Ze = 1.0 / sigma_ratio;
    return {Ze * Z_over_Ze, Z_over_Ze};
}

/// Evaluate every response quantity at one angular frequency.
inline ComplexResponse response(const DerivedScalars& d, double omega)
{
    ComplexResponse r;
    r.omega = omega;
    std::tie(r.alpha_p, r.alpha_s, r.alpha) = polarizability(d, omega);
    r.kappa = local_field_factor(d, omega);
    std::tie(r.chi_p, r.chi_s) = susceptibilities(d, omega);
    r.sigma_eff_ratio = 1.0 + r.chi_s + (1.0 - d.sigma_m_over_sigma_e) * r.chi_p;
    r.eps_star = omega > 0.0 ? complex_permittivity(d, omega) : cplx(0.0, 0.0);
    r.Z_over_Ze = 1.0 / r.sigma_eff_ratio;
    return r;
}

} // namespace aggpol

#endif // AGGPOL_MEDIA_HPP
