#ifndef AGGPOL_PEARSON_HPP
#define AGGPOL_PEARSON_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "aggpol/errors.hpp"
#include "aggpol/special.hpp"

namespace aggpol {

// ============================================================================
//  Stationary Pearson statistics
//
//  The polarization component parallel to the drive relaxes to a skewed
//  t-density (Pearson IV); the transverse component to a symmetric scaled
//  t-density (Pearson VII).  This module evaluates those densities, their
//  central moments, the method-of-moments fit, and the bidirectional map
//  between distribution shape (ν, c, a, λ) and Langevin noise parameters
//  (ᾱ, γ̄, α′, γ′, ε, u).
// ============================================================================

/// Shape of the stationary density: exponent, skew, scale, location.
struct PearsonParams {
    double nu = 0.0;     ///< shape exponent, > 1/2
    double c = 0.0;      ///< skew; 0 = symmetric scaled t
    double a = 0.0;      ///< scale, A/mm^2
    double lambda = 0.0; ///< location, A/mm^2

    void validate() const
    {
        if (!(a > 0.0))
            throw parameter_error("PearsonParams: scale a must be positive");
        if (!(nu > 0.5))
            throw parameter_error("PearsonParams: nu <= 1/2, density not normalizable");
    }
};

/// Langevin noise parameters; chi selects the stochastic calculus
/// (0 = Ito, 1 = Stratonovich).
struct NoiseParams {
    double alpha_bar = 0.0;   ///< forcing rate, S/F
    double gamma_bar = 0.0;   ///< relaxation rate, S/F
    double alpha_prime = 0.0; ///< additive noise amplitude, sqrt(S/F)
    double gamma_prime = 0.0; ///< multiplicative noise amplitude, sqrt(S/F)
    double epsilon = 0.0;     ///< additive/multiplicative cross-correlation
    double u = 0.0;           ///< drive, A/mm^2
    int chi = 1;              ///< calculus selector, 0 or 1

    void validate() const
    {
        if (!(std::abs(epsilon) <= 1.0))
            throw parameter_error("NoiseParams: |epsilon| must not exceed 1");
        if (!(gamma_prime > 0.0))
            throw parameter_error("NoiseParams: gamma_prime must be positive");
        if (!(alpha_prime > 0.0))
            throw parameter_error("NoiseParams: alpha_prime must be positive");
        if (!(gamma_bar > gamma_prime * gamma_prime))
            throw parameter_error("NoiseParams: gamma_bar must exceed gamma_prime^2");
        if (chi != 0 && chi != 1)
            throw parameter_error("NoiseParams: chi must be 0 or 1");
    }

    /// Deterministic moment runs allow zero noise amplitudes (the stationary
    /// maps above do not).
    void validate_for_dynamics() const
    {
        if (!(std::abs(epsilon) <= 1.0))
            throw parameter_error("NoiseParams: |epsilon| must not exceed 1");
        if (!(gamma_prime >= 0.0) || !(alpha_prime >= 0.0))
            throw parameter_error("NoiseParams: noise amplitudes must be non-negative");
        if (!(gamma_bar > gamma_prime * gamma_prime))
            throw parameter_error("NoiseParams: gamma_bar must exceed gamma_prime^2");
        if (chi != 0 && chi != 1)
            throw parameter_error("NoiseParams: chi must be 0 or 1");
    }
};

/// First four moments of a sample or distribution (mean + central moments).
struct MomentSet {
    double mean = 0.0;
    double mu2 = 0.0;
    double mu3 = 0.0;
    double mu4 = 0.0;
};

struct CentralMoments {
    double mean = 0.0;       ///< first raw moment
    std::vector<double> mu;  ///< mu[n] = n-th central moment; mu[0]=1, mu[1]=0
};

// ----------------------------------------------------------------------------
//  Density
// ----------------------------------------------------------------------------

/// log of the Pearson-IV normalization constant K.
inline double log_normalization(const PearsonParams& p)
{
    p.validate();
    const double log_gamma_abs2 =
        2.0 * special::log_gamma({p.nu, p.c}).real();
    return log_gamma_abs2 - std::log(p.a) - 0.5 * std::log(pi)
           - std::lgamma(p.nu) - std::lgamma(p.nu - 0.5);
}

/// Stationary density W(x).  Evaluated in log space; large ν is safe.
inline double stationary_density(const PearsonParams& p, double x)
{
    const double z = (x - p.lambda) / p.a;
    const double logw = log_normalization(p)
                        + 2.0 * p.c * std::atan(z)
                        - p.nu * std::log1p(z * z);
    return std::exp(logw);
}

// ----------------------------------------------------------------------------
//  Noise <-> shape maps
// ----------------------------------------------------------------------------

/// Stationary shape implied by the Langevin noise parameters.
inline PearsonParams params_from_noise(const NoiseParams& n)
{
    n.validate();
    const double eps2 = n.epsilon * n.epsilon;
    if (!(eps2 < 1.0))
        throw parameter_error("params_from_noise: |epsilon| = 1 collapses the scale");
    const double root = std::sqrt(1.0 - eps2);

    PearsonParams p;
    p.nu = 0.5 * n.chi + n.gamma_bar / (n.gamma_prime * n.gamma_prime);
    p.c = (n.epsilon * n.alpha_prime * n.gamma_bar - n.alpha_bar * n.gamma_prime)
          / (n.alpha_prime * n.gamma_prime * n.gamma_prime * root);
    p.a = n.alpha_prime * n.u * root / n.gamma_prime;
    p.lambda = -n.epsilon * n.alpha_prime * n.u / n.gamma_prime;
    if (p.a < 0.0) {
        // (a, c) -> (-a, -c) leaves the density invariant; keep a positive.
        p.a = -p.a;
        p.c = -p.c;
    }
    if (p.a == 0.0)
        throw parameter_error("params_from_noise: u = 0 collapses the scale");
    return p;
}

/// Invert the fit: noise parameters from a fitted shape plus the two
/// deterministic rates.  Inverse of params_from_noise up to sign conventions.
inline NoiseParams noise_from_fit(const PearsonParams& p, double alpha_bar,
                                  double gamma_bar, int chi)
{
    p.validate();
    if (!(p.nu > 0.5 * chi))
        throw parameter_error("noise_from_fit: nu must exceed chi/2");
    if (p.lambda == 0.0)
        throw parameter_error(
            "noise_from_fit: lambda = 0 leaves epsilon undefined "
            "(transverse direction; use transverse_constraint instead)");

    NoiseParams n;
    n.alpha_bar = alpha_bar;
    n.gamma_bar = gamma_bar;
    n.chi = chi;
    n.gamma_prime = std::sqrt(gamma_bar / (p.nu - 0.5 * chi));
    n.epsilon = 1.0 / std::sqrt(1.0 + (p.a * p.a) / (p.lambda * p.lambda));
    const double root = std::sqrt(1.0 - n.epsilon * n.epsilon);
    const double denom = n.epsilon * gamma_bar
                         - p.c * n.gamma_prime * n.gamma_prime * root;
    if (denom == 0.0)
        throw singular_error("noise_from_fit: alpha_prime denominator vanished");
    n.alpha_prime = alpha_bar * n.gamma_prime / denom;
    n.u = -p.lambda * n.gamma_prime / (n.epsilon * n.alpha_prime);
    return n;
}

/// Transverse multiplicative amplitude implied by the diffusion constraint
/// eps*alpha'/alpha_bar = gamma'/gamma_bar; the resulting transverse shape
/// has c = 0 (symmetric scaled t).
inline double transverse_constraint(double alpha_bar, double gamma_bar,
                                    double alpha_prime_perp, double epsilon_perp)
{
    if (!(alpha_bar > 0.0) || !(gamma_bar > 0.0) || !(alpha_prime_perp > 0.0))
        throw parameter_error("transverse_constraint: rates must be positive");
    if (!(std::abs(epsilon_perp) <= 1.0))
        throw parameter_error("transverse_constraint: |epsilon_perp| must not exceed 1");
    return gamma_bar * epsilon_perp * alpha_prime_perp / alpha_bar;
}

// ----------------------------------------------------------------------------
//  Moments
// ----------------------------------------------------------------------------

/// Closed-form stationary mean and variance from the noise parameters.
inline std::pair<double, double> stationary_moments(const NoiseParams& n)
{
    n.validate();
    const double g2 = n.gamma_prime * n.gamma_prime;
    if (!(n.gamma_bar > g2))
        throw moment_divergence_error(
            "stationary_moments: mean requires gamma_bar > gamma_prime^2");
    const double nu = 0.5 * n.chi + n.gamma_bar / g2;
    if (!(2.0 * nu - 3.0 > 0.0))
        throw moment_divergence_error(
            "stationary_moments: variance requires 2*nu - 3 > 0");

    const double mu = (n.epsilon * n.alpha_prime * n.gamma_prime * n.u
                       - n.alpha_bar * n.u)
                      / (n.gamma_bar - g2);
    const double sigma2 = (g2 * mu * mu
                           + 2.0 * n.epsilon * n.gamma_prime * n.alpha_prime * n.u * mu
                           + n.alpha_prime * n.alpha_prime * n.u * n.u)
                          / (2.0 * (n.gamma_bar - g2));
    return {mu, sigma2};
}

/// Central moments mu_0..mu_nmax by recurrence, mean reported separately.
/// Order n exists only while 2(nu-1) > (n-1); beyond that the recurrence is
/// meaningless and the request throws.
inline CentralMoments central_moments(const PearsonParams& p, std::size_t n_max)
{
    p.validate();
    if (n_max >= 1 && !(p.nu > 1.0))
        throw moment_divergence_error("central_moments: mean requires nu > 1");
    for (std::size_t n = 2; n <= n_max; ++n) {
        if (!(2.0 * (p.nu - 1.0) > static_cast<double>(n - 1)))
            throw moment_divergence_error(
                "central_moments: order " + std::to_string(n)
                + " requires 2(nu-1) > " + std::to_string(n - 1));
    }

    CentralMoments out;
    out.mean = p.a * p.c / (p.nu - 1.0) + p.lambda;
    out.mu.assign(n_max + 1, 0.0);
    out.mu[0] = 1.0;
    const double num1 = p.nu - 1.0;
    const double s = num1 * num1 + p.c * p.c;
    for (std::size_t n = 2; n <= n_max; ++n) {
        const double k = static_cast<double>(n - 1);
        const double pref = p.a * k / (num1 * num1 * (2.0 * num1 - k));
        out.mu[n] = pref * (2.0 * p.c * num1 * out.mu[n - 1]
                            + p.a * s * out.mu[n - 2]);
    }
    return out;
}

/// Method-of-moments Pearson-IV fit from (mean, mu2, mu3, mu4).
///
/// Solves the skewness/kurtosis system for (nu, c), then the variance for a
/// and the mean for lambda.  Inputs whose (beta1, beta2) fall outside the
/// skewed-t region — or fit an exponent above nu_cap, i.e. are effectively
/// Gaussian — are rejected.
inline PearsonParams fit_moments(const MomentSet& m, double nu_cap = 1e6)
{
    if (!(m.mu2 > 0.0))
        throw parameter_error("fit_moments: mu2 must be positive");
    if (!(m.mu4 > m.mu2 * m.mu2))
        throw parameter_error("fit_moments: mu4 <= mu2^2 violates Jensen");

    const double beta1 = (m.mu3 * m.mu3) / (m.mu2 * m.mu2 * m.mu2);
    const double beta2 = m.mu4 / (m.mu2 * m.mu2);

    const double denom = 2.0 * beta2 - 3.0 * beta1 - 6.0;
    if (denom == 0.0)
        throw numeric_error("fit_moments: not Pearson IV (type boundary 2*beta2-3*beta1-6 = 0)");
    const double r = 6.0 * (beta2 - beta1 - 1.0) / denom; // r = 2(nu-1)
    const double nu = 0.5 * r + 1.0;
    if (!(nu > 2.5))
        throw numeric_error("fit_moments: not Pearson IV (fitted nu <= 5/2, "
                            "fourth moment would not exist)");
    if (nu > nu_cap)
        throw numeric_error("fit_moments: not Pearson IV (fitted nu exceeds cap; "
                            "moments are effectively Gaussian)");

    const double vden = 16.0 * (r - 1.0) - beta1 * (r - 2.0) * (r - 2.0);
    if (!(vden > 0.0))
        throw numeric_error("fit_moments: not Pearson IV (skew discriminant non-positive)");
    const double v2 = r * r * (r - 2.0) * (r - 2.0) * beta1 / vden;
    // v = -2c; the sign of c follows the sign of mu3.
    double c = 0.5 * std::sqrt(v2);
    if (m.mu3 < 0.0)
        c = -c;

    const double v = 2.0 * c; // |v| with c's sign folded in; only v^2 enters a
    const double a = std::sqrt(m.mu2 * r * r * (r - 1.0) / (r * r + v * v));
    const double lambda = m.mean - a * c / (nu - 1.0);

    PearsonParams p{nu, c, a, lambda};
    p.validate();
    return p;
}

// ----------------------------------------------------------------------------
//  Subfamily classification
// ----------------------------------------------------------------------------

enum class PearsonFamily {
    normal_ou,       ///< constant diffusion: Ornstein-Uhlenbeck
    gamma_cir,       ///< linear diffusion: square-root / CIR
    beta_jacobi,     ///< concave quadratic diffusion: Jacobi
    fisher_snedecor, ///< convex quadratic, two real roots
    inverse_gamma,   ///< convex quadratic, double root
    skewed_t,        ///< convex quadratic, complex roots, off-center drift
    scaled_t,        ///< convex quadratic, complex roots, centered drift
};

inline const char* to_string(PearsonFamily f)
{
    switch (f) {
    case PearsonFamily::normal_ou: return "normal/OU";
    case PearsonFamily::gamma_cir: return "gamma/CIR";
    case PearsonFamily::beta_jacobi: return "beta/Jacobi";
    case PearsonFamily::fisher_snedecor: return "Fisher-Snedecor";
    case PearsonFamily::inverse_gamma: return "inverse-gamma";
    case PearsonFamily::skewed_t: return "skewed-t";
    case PearsonFamily::scaled_t: return "scaled-t";
    }
    return "unknown";
}

/// Classify the stationary subfamily of dX = (b0 + b1 X)dt + sqrt(2 D(X))dW
/// with D(X) = d0 + d1 X + d2 X².  Total: every coefficient set maps to a tag.
///
/// Within the complex-root (t) branch, the density is symmetric exactly when
/// the drift vanishes at the diffusion vertex; that combination is the skew
/// indicator mu_hat.
inline PearsonFamily classify(const std::array<double, 2>& drift,
                              const std::array<double, 3>& diffusion)
{
    const double b0 = drift[0], b1 = drift[1];
    const double d0 = diffusion[0], d1 = diffusion[1], d2 = diffusion[2];

    if (d2 == 0.0 && d1 == 0.0)
        return PearsonFamily::normal_ou;
    if (d2 == 0.0)
        return PearsonFamily::gamma_cir;
    if (d2 < 0.0)
        return PearsonFamily::beta_jacobi;

    const double disc = d1 * d1 - 4.0 * d0 * d2;
    if (disc > 0.0)
        return PearsonFamily::fisher_snedecor;
    if (disc == 0.0)
        return PearsonFamily::inverse_gamma;

    const double vertex = -d1 / (2.0 * d2);
    const double mu_hat = b0 + b1 * vertex;
    const double scale = std::abs(b0) + std::abs(b1 * vertex);
    if (scale > 0.0 && std::abs(mu_hat) > 1e-12 * scale)
        return PearsonFamily::skewed_t;
    return PearsonFamily::scaled_t;
}

} // namespace aggpol

#endif // AGGPOL_PEARSON_HPP
