#ifndef AGGPOL_DYNAMICS_HPP
#define AGGPOL_DYNAMICS_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "aggpol/drive.hpp"
#include "aggpol/errors.hpp"
#include "aggpol/media.hpp"
#include "aggpol/ode.hpp"
#include "aggpol/pearson.hpp"

namespace aggpol {

// ============================================================================
//  Integer-order moment dynamics
//
//  Evolves the mean and variance of the parallel polarization density under
//  an external field, optionally coupling the drive back through the
//  mean-field closure.  Aggregate densities (nP, nS, J) are carried in
//  A/mm^2; electric fields in V/m.  The conversion sigma*E [A/m^2] ->
//  A/mm^2 is the 1e-6 factor appearing below.
// ============================================================================

enum class CouplingMode { fixed_field, self_consistent };

struct MomentState {
    double mu = 0.0;     ///< mean polarization density, A/mm^2
    double sigma2 = 0.0; ///< variance, (A/mm^2)^2
};

struct MomentTrajectory {
    std::vector<double> t;         ///< s
    std::vector<double> E_ext;     ///< V/m
    std::vector<double> u;         ///< effective drive, A/mm^2
    std::vector<double> mu;        ///< A/mm^2
    std::vector<double> sigma2;    ///< (A/mm^2)^2
    std::vector<double> nP;        ///< aggregate dipolar density, A/mm^2
    std::vector<double> nS;        ///< aggregate cytoplasm density, A/mm^2
    std::vector<double> J;         ///< mean current density, A/mm^2
    std::vector<double> sigma_eff; ///< S/m (NaN where E_ext ~ 0)
    std::vector<double> R_eff;     ///< Ohm*m (NaN where E_ext ~ 0)
};

namespace detail {
/// phi entering the aggregation formulas; phi_box when configured, else phi.
inline double phi_box(const MediumParams& p)
{
    return p.phi_box ? *p.phi_box : p.phi;
}
} // namespace detail

/// Mean matrix field from the applied field and the aggregate dipolar
/// polarization density (A/mm^2).
inline double field_closure(double E_ext, double nP, const MediumParams& p)
{
    const double sigma_tilde =
        2.0 * p.sigma_e + p.sigma_c + p.phi * (p.sigma_e - p.sigma_c);
    const double phi = detail::phi_box(p);
    const double nu_ratio = p.sigma_c / p.sigma_e;
    return (sigma_tilde * E_ext - nu_ratio * phi * nP * 1e6)
           / ((2.0 + 3.0 * phi) * p.sigma_e + p.sigma_c);
}

/// Aggregate cytoplasm polarization density from the membrane one (A/mm^2).
inline double cytoplasm_from_membrane(double nP, double E, const MediumParams& p)
{
    const double phi = detail::phi_box(p);
    if (phi == 0.0)
        return 0.0;
    const double sigma_tilde =
        2.0 * p.sigma_e + p.sigma_c + p.phi * (p.sigma_e - p.sigma_c);
    return -3.0 * phi * (p.sigma_e - p.sigma_c) / sigma_tilde
           * (p.sigma_e * E * 1e-6 + (2.0 + phi) / (3.0 * phi) * nP);
}

/// Right-hand side of the moment equations at drive value u.
inline MomentState moment_rhs(const MomentState& s, double u, const NoiseParams& n)
{
    const double g2 = n.gamma_prime * n.gamma_prime;
    const double cross = n.epsilon * n.gamma_prime * n.alpha_prime;
    MomentState d;
    d.mu = -n.gamma_bar * s.mu - n.alpha_bar * u + g2 * s.mu + cross * u;
    d.sigma2 = -2.0 * (n.gamma_bar - g2) * s.sigma2
               + g2 * s.mu * s.mu + 2.0 * cross * u * s.mu
               + n.alpha_prime * n.alpha_prime * u * u;
    return d;
}

/// Shape parameters of the time-dependent density surrogate.
inline std::pair<double, double> dynamic_shape(double mu_t, double sigma2_t,
                                               double a, double lambda)
{
    if (!(sigma2_t > 0.0))
        throw numeric_error("dynamic_shape: sigma2 = 0, shape undefined");
    const double d = mu_t - lambda;
    const double nu_t = (a * a + d * d + 3.0 * sigma2_t) / (2.0 * sigma2_t);
    const double c_t = (a * a + d * d + sigma2_t) / (2.0 * a * sigma2_t) * d;
    return {nu_t, c_t};
}

/// Integrate the moment equations under drive E_ext(t) over t_span,
/// sampling the trajectory on a uniform grid of n_out intervals.
///
/// fixed-field mode drives with u = sigma_e kappa(0)^-1 E_ext; self-consistent
/// mode recomputes the matrix field from nP = phi*mu at every evaluation.
/// Internally time is nondimensionalized by 1/gamma_bar.
inline MomentTrajectory integrate_moments(const NoiseParams& n, const MediumParams& p,
                                          const DriveSignal& drive,
                                          std::pair<double, double> t_span,
                                          CouplingMode mode,
                                          double rtol = 1e-8, double atol = 1e-12,
                                          std::size_t n_out = 2000,
                                          MomentState y0 = {})
{
    n.validate_for_dynamics();
    p.validate();
    drive.validate();
    if (!(t_span.second > t_span.first))
        throw parameter_error("integrate_moments: empty time span");
    if (n_out < 1)
        throw parameter_error("integrate_moments: n_out must be at least 1");

    const DerivedScalars d = derive_scalars(p);
    const double kappa0_inv = 1.0 / local_field_factor(d, 0.0).real();
    const double phi = detail::phi_box(p);
    const double tscale = 1.0 / d.gamma_bar; // nondimensionalization

    auto u_of = [&](double t, double mu) {
        const double E_ext = drive(t);
        if (mode == CouplingMode::fixed_field)
            return p.sigma_e * kappa0_inv * E_ext * 1e-6;
        const double E = field_closure(E_ext, phi * mu, p);
        return p.sigma_e * E * 1e-6;
    };

    auto rhs = [&](double s, const std::array<double, 2>& y,
                   std::array<double, 2>& dyds) {
        const double t = s * tscale;
        const MomentState st{y[0], y[1]};
        const MomentState r = moment_rhs(st, u_of(t, y[0]), n);
        dyds[0] = r.mu * tscale;
        dyds[1] = r.sigma2 * tscale;
    };

    DormandPrince<2, decltype(rhs)> solver(rhs, rtol, atol);

    MomentTrajectory traj;
    const double t0 = t_span.first, t1 = t_span.second;
    const double dt_out = (t1 - t0) / static_cast<double>(n_out);
    traj.t.reserve(n_out + 1);
    traj.mu.reserve(n_out + 1);
    traj.sigma2.reserve(n_out + 1);

    std::array<double, 2> y = {y0.mu, y0.sigma2};
    double s = t0 / tscale;

    const auto switches = drive.restart_points(t0, t1);
    std::size_t next_switch = 0;

    traj.t.push_back(t0);
    traj.mu.push_back(y[0]);
    traj.sigma2.push_back(y[1]);

    for (std::size_t k = 1; k <= n_out; ++k) {
        const double t_next = t0 + static_cast<double>(k) * dt_out;
        double t_cur = s * tscale;
        // Integrate through any drive switch inside this output interval,
        // restarting the controller exactly at the discontinuity.
        while (next_switch < switches.size() && switches[next_switch] <= t_next) {
            const double t_sw = switches[next_switch];
            if (t_sw > t_cur) {
                solver.advance(s, y, t_sw / tscale);
                t_cur = t_sw;
            }
            solver.reset();
            ++next_switch;
        }
        if (t_next > t_cur)
            solver.advance(s, y, t_next / tscale);
        traj.t.push_back(t_next);
        traj.mu.push_back(y[0]);
        traj.sigma2.push_back(y[1]);
    }

    // Drive bookkeeping on the output grid.
    traj.E_ext.resize(traj.t.size());
    traj.u.resize(traj.t.size());
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        traj.E_ext[i] = drive(traj.t[i]);
        traj.u[i] = u_of(traj.t[i], traj.mu[i]);
    }
    return traj;
}

/// Fill nP, nS, J, sigma_eff, R_eff on an integrated trajectory.
///
/// sigma_eff and R_eff are NaN wherever |E_ext| < 1e-6 * max|E_ext| — the
/// quotient J/E_ext is meaningless around drive switch-off.
inline void observables(MomentTrajectory& traj, const MediumParams& p)
{
    p.validate();
    const DerivedScalars d = derive_scalars(p);
    const double phi = detail::phi_box(p);
    const double nu = d.nu_ratio;
    const double sm = d.sigma_m_over_sigma_e;

    double Emax = 0.0;
    for (double e : traj.E_ext)
        Emax = std::max(Emax, std::abs(e));
    const double floor = 1e-6 * Emax;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    const std::size_t m = traj.t.size();
    traj.nP.resize(m);
    traj.nS.resize(m);
    traj.J.resize(m);
    traj.sigma_eff.resize(m);
    traj.R_eff.resize(m);

    const double field_coeff = (2.0 + nu + 3.0 * phi * nu) / (2.0 + nu + 3.0 * phi);
    const double pol_coeff =
        1.0 - sm - (p.sigma_e - p.sigma_c) / d.sigma_tilde
                  * (2.0 + phi - 3.0 * nu * phi * phi / (2.0 + 3.0 * phi + nu));

    for (std::size_t i = 0; i < m; ++i) {
        const double nP = phi * traj.mu[i];
        const double E = field_closure(traj.E_ext[i], nP, p);
        traj.nP[i] = nP;
        traj.nS[i] = cytoplasm_from_membrane(nP, E, p);
        traj.J[i] = p.sigma_e * traj.E_ext[i] * 1e-6 * field_coeff + nP * pol_coeff;
        if (std::abs(traj.E_ext[i]) < floor || Emax == 0.0) {
            traj.sigma_eff[i] = nan;
            traj.R_eff[i] = nan;
        } else {
            traj.sigma_eff[i] = traj.J[i] * 1e6 / traj.E_ext[i];
            traj.R_eff[i] = 1.0 / traj.sigma_eff[i];
        }
    }
}

} // namespace aggpol

#endif // AGGPOL_DYNAMICS_HPP
