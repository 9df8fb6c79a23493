#ifndef AGGPOL_SPECTRO_HPP
#define AGGPOL_SPECTRO_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iterator>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aggpol/csv.hpp"
#include "aggpol/dynamics.hpp"
#include "aggpol/fft.hpp"
#include "aggpol/fractional.hpp"
#include "aggpol/media.hpp"
#include "aggpol/pearson.hpp"

namespace aggpol {

// ============================================================================
//  Pulse-driven impedance spectroscopy
//
//  A short Gaussian field pulse excites the sample; the recorded current
//  transient is Fourier-transformed against the drive to recover Z(f),
//  sigma*(f) and eps*(f) across the full dispersion band in one run.
// ============================================================================

/// Drive pulse E0 exp(-6 ((t - t_f/3)/t_f)^2); effectively zero outside
/// [0, t_f] (the edges sit at exp(-2/3*...) ~ 2e-3 and below 1e-10 by 2 t_f).
inline double gaussian_pulse(double E0, double t_f, double t)
{
    if (!(t_f > 0.0))
        throw parameter_error("gaussian_pulse: t_f must be positive");
    const double z = (t - t_f / 3.0) / t_f;
    return E0 * std::exp(-6.0 * z * z);
}

struct Spectrum {
    std::vector<double> f;        ///< Hz
    std::vector<cplx> Z;          ///< Ohm
    std::vector<cplx> sigma_star; ///< S/m
    std::vector<cplx> eps_star;   ///< relative
};

// ----------------------------------------------------------------------------
//  Transient -> spectrum
// ----------------------------------------------------------------------------

/// Impedance spectrum from a drive/current transient pair on a uniform grid.
///
/// Both signals must have decayed below 1e-6 of their own peak by the end of
/// the record; otherwise the implied periodization would contaminate every
/// bin and the transform refuses to run.  Records are zero-padded 4x for
/// frequency resolution; bins where the drive spectrum has dropped below
/// 1e-8 of its peak carry no usable signal and are omitted.
inline Spectrum dft_impedance(const std::vector<double>& E_ext,
                              const std::vector<double>& J_SI, double dt,
                              double H, double A_el, double sigma_e)
{
    if (E_ext.size() != J_SI.size())
        throw parameter_error("dft_impedance: signal lengths differ");
    if (E_ext.size() < 16)
        throw parameter_error("dft_impedance: record too short");
    if (!(dt > 0.0) || !(H > 0.0) || !(A_el > 0.0))
        throw parameter_error("dft_impedance: dt, H, A_el must be positive");

    auto check_decay = [](const std::vector<double>& x, const char* name) {
        double peak = 0.0;
        for (double v : x)
            peak = std::max(peak, std::abs(v));
        if (peak > 0.0 && std::abs(x.back()) > 1e-6 * peak)
            throw leakage_error(std::string("dft_impedance: ") + name
                                + " has not decayed below 1e-6 of its peak by the "
                                  "end of the record; extend t_record");
    };
    check_decay(E_ext, "drive");
    check_decay(J_SI, "current");

    const std::size_t n = E_ext.size();
    const std::size_t n_pad = 4 * n;
    std::vector<double> e(E_ext);
    std::vector<double> j(J_SI);
    e.resize(n_pad, 0.0);
    j.resize(n_pad, 0.0);

    const auto Ehat = rfft(e);
    const auto Jhat = rfft(j);

    double Emax = 0.0;
    for (const auto& v : Ehat)
        Emax = std::max(Emax, std::abs(v));

    const double cell = H / A_el; // geometric factor, 1/m
    const double df = 1.0 / (static_cast<double>(n_pad) * dt);

    Spectrum s;
    for (std::size_t k = 1; k < Ehat.size(); ++k) {
        if (std::abs(Ehat[k]) < 1e-8 * Emax)
            continue;
        const double f = static_cast<double>(k) * df;
        const cplx Z = cell * Ehat[k] / Jhat[k];
        const cplx sig = cell / Z;
        s.f.push_back(f);
        s.Z.push_back(Z);
        s.sigma_star.push_back(sig);
        s.eps_star.push_back((sig - sigma_e) / (cplx(0.0, 2.0 * pi * f) * eps0));
    }
    return s;
}

// ----------------------------------------------------------------------------
//  Analytic spectra
// ----------------------------------------------------------------------------

/// Z/Ze of the fractional-order chain at angular frequency omega.  With
/// alpha = 1 and vanishing multiplicative noise this reduces exactly to the
/// quasistatic single-relaxation result.
inline cplx fractional_impedance_ratio(const MediumParams& p, const NoiseParams& n,
                                       double alpha, double omega)
{
    p.validate();
    if (p.phi_box && *p.phi_box != p.phi)
        throw parameter_error("fractional_impedance_ratio: distinct phi_box is "
                              "not supported here");
    if (!(omega >= 0.0))
        throw parameter_error("fractional_impedance_ratio: omega must be >= 0");

    const DerivedScalars d = derive_scalars(p);
    const TransferDescriptor h = impulse_and_transfer(n, alpha);
    const cplx H = omega == 0.0 ? cplx(h.gain / h.rate, 0.0) : h.at_omega(omega);

    const double phi = p.phi;
    const double B = (2.0 + 3.0 * phi) * p.sigma_e + p.sigma_c;
    const cplx kappa = (B + phi * phi * p.sigma_c * H) / d.sigma_tilde;
    if (kappa == cplx(0.0, 0.0))
        throw singular_error("fractional_impedance_ratio: local field factor "
                             "vanished");
    const cplx chi_p = phi * H / kappa;
    const cplx chi_s = -3.0 * phi * (p.sigma_e - p.sigma_c) / d.sigma_tilde
                       * (1.0 + (2.0 + phi) * H / 3.0) / kappa;
    const cplx ratio = 1.0 + chi_s + (1.0 - d.sigma_m_over_sigma_e) * chi_p;
    if (ratio == cplx(0.0, 0.0))
        throw singular_error("fractional_impedance_ratio: conductivity ratio "
                             "vanished");
    return 1.0 / ratio;
}

/// Model spectrum on a log-spaced frequency grid.  alpha = 1 takes the
/// quasistatic route (no noise parameters needed); other orders evaluate the
/// fractional chain, deriving relaxation scalars from the medium when no
/// noise set is supplied.
inline Spectrum analytic_spectrum(const MediumParams& p,
                                  const std::optional<NoiseParams>& noise,
                                  double alpha, double H, double A_el,
                                  double fmin, double fmax, std::size_t points)
{
    p.validate();
    if (!(fmin > 0.0) || !(fmax > fmin))
        throw parameter_error("analytic_spectrum: need 0 < fmin < fmax");
    if (points < 2)
        throw parameter_error("analytic_spectrum: need at least 2 points");

    const DerivedScalars d = derive_scalars(p);
    NoiseParams n;
    if (noise) {
        n = *noise;
    } else {
        n.alpha_bar = d.alpha_bar;
        n.gamma_bar = d.gamma_bar;
        n.alpha_prime = 0.0;
        n.gamma_prime = 0.0;
        n.epsilon = 0.0;
        n.u = 0.0;
        n.chi = 1;
    }

    const double cell = H / A_el;
    const double Ze = cell / p.sigma_e;
    const double lmin = std::log(fmin), lmax = std::log(fmax);

    Spectrum s;
    for (std::size_t i = 0; i < points; ++i) {
        const double f = std::exp(lmin + (lmax - lmin) * static_cast<double>(i)
                                             / static_cast<double>(points - 1));
        const double omega = 2.0 * pi * f;
        cplx ratio; // Z/Ze
        if (alpha == 1.0)
            ratio = impedance(d, omega, H, A_el).second;
        else
            ratio = fractional_impedance_ratio(p, n, alpha, omega);
        const cplx Z = Ze * ratio;
        const cplx sig = cell / Z;
        s.f.push_back(f);
        s.Z.push_back(Z);
        s.sigma_star.push_back(sig);
        s.eps_star.push_back((sig - p.sigma_e) / (cplx(0.0, omega) * eps0));
    }
    return s;
}

// ----------------------------------------------------------------------------
//  Experiments
// ----------------------------------------------------------------------------

struct ExperimentConfig {
    std::string id;                   ///< label, also used for file naming
    MediumParams medium{};
    std::optional<NoiseParams> noise; ///< derived from the medium when absent
    double alpha = 1.0;
    DriveSignal drive{};              ///< E_ext(t), V/m
    double box = 1e-3;                ///< sample cube edge, m
    double H = 1e-3;                  ///< electrode spacing, m
    double A_el = 1e-6;               ///< electrode area, m^2
    double dt = 1e-9;                 ///< record/integration step, s
    double t_f = 20e-6;               ///< drive pulse duration, s
    double t_record = 25e-6;          ///< record length, s
    CouplingMode coupling = CouplingMode::self_consistent;
    bool want_spectrum = true;
    double rtol = 1e-8;
    double atol = 1e-12;
    std::string sweep_key;            ///< which parameter a sweep varies
    double sweep_value = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config; ///< as actually run (t_record may be extended)
    DerivedScalars derived{};
    MomentTrajectory traj;
    std::optional<Spectrum> spectrum;
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    cfg.medium.validate();
    cfg.drive.validate();
    if (!(cfg.dt > 0.0) || !(cfg.t_record > cfg.dt))
        throw config_error("run_experiment: need 0 < dt < t_record");
    if (!(cfg.H > 0.0) || !(cfg.A_el > 0.0) || !(cfg.box > 0.0))
        throw config_error("run_experiment: geometry must be positive");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0))
        throw config_error("run_experiment: alpha must lie in (0, 2)");
    if (cfg.want_spectrum && cfg.dt > 1e-9 * (1.0 + 1e-9))
        throw config_error("run_experiment: spectra require dt <= 1 ns");

    ExperimentResult res;
    res.config = cfg;
    res.derived = derive_scalars(cfg.medium);

    NoiseParams n;
    if (cfg.noise) {
        n = *cfg.noise;
    } else {
        n.alpha_bar = res.derived.alpha_bar;
        n.gamma_bar = res.derived.gamma_bar;
        n.alpha_prime = 0.0;
        n.gamma_prime = 0.0;
        n.epsilon = 0.0;
        n.u = 0.0;
        n.chi = 1;
    }

    const auto n_steps =
        static_cast<std::size_t>(std::llround(cfg.t_record / cfg.dt));
    if (n_steps < 16)
        throw config_error("run_experiment: record shorter than 16 steps");
    const double dt_eff = cfg.t_record / static_cast<double>(n_steps);

    if (cfg.alpha == 1.0) {
        res.traj = integrate_moments(n, cfg.medium, cfg.drive,
                                     {0.0, cfg.t_record}, cfg.coupling,
                                     cfg.rtol, cfg.atol, n_steps);
    } else {
        res.traj = integrate_fractional_moments_coupled(
            n, cfg.medium, cfg.drive, cfg.alpha, dt_eff, {0.0, cfg.t_record},
            cfg.coupling);
    }
    observables(res.traj, cfg.medium);

    if (cfg.want_spectrum) {
        std::vector<double> J_SI(res.traj.J.size());
        for (std::size_t i = 0; i < J_SI.size(); ++i)
            J_SI[i] = res.traj.J[i] * 1e6;
        res.spectrum = dft_impedance(res.traj.E_ext, J_SI, dt_eff, cfg.H,
                                     cfg.A_el, cfg.medium.sigma_e);
    }
    return res;
}

/// run_experiment, extending the record window on leakage until the decay
/// guard is satisfied (or the ladder is exhausted, rethrowing the last
/// refusal).  Slowly ringing transients — alpha above one especially — need
/// the longer windows.
inline ExperimentResult run_with_guard_extension(ExperimentConfig cfg)
{
    constexpr double ladder[] = {50e-6, 100e-6, 200e-6, 400e-6};
    std::size_t next = 0;
    for (;;) {
        try {
            return run_experiment(cfg);
        } catch (const leakage_error&) {
            while (next < std::size(ladder) && ladder[next] <= cfg.t_record)
                ++next;
            if (next == std::size(ladder))
                throw;
            cfg.t_record = ladder[next++];
        }
    }
}

// ----------------------------------------------------------------------------
//  CSV emission
// ----------------------------------------------------------------------------

inline void emit_trajectory(const MomentTrajectory& traj, const std::string& path)
{
    write_csv(path,
              {"t_s", "E_ext_V_per_m", "u_A_per_mm2", "mu_A_per_mm2", "sigma2",
               "nP", "nS", "J_A_per_mm2", "sigma_eff_S_per_m", "R_eff"},
              {traj.t, traj.E_ext, traj.u, traj.mu, traj.sigma2, traj.nP,
               traj.nS, traj.J, traj.sigma_eff, traj.R_eff});
}

inline void emit_spectrum(const Spectrum& s, const std::string& path)
{
    const std::size_t m = s.f.size();
    std::vector<double> re_z(m), im_z(m), abs_z(m), phase(m), re_sig(m),
        im_sig(m), eps_p(m), eps_pp(m);
    for (std::size_t i = 0; i < m; ++i) {
        re_z[i] = s.Z[i].real();
        im_z[i] = s.Z[i].imag();
        abs_z[i] = std::abs(s.Z[i]);
        phase[i] = std::arg(s.Z[i]) * 180.0 / pi;
        re_sig[i] = s.sigma_star[i].real();
        im_sig[i] = s.sigma_star[i].imag();
        // eps* = eps' - j eps'': the loss column carries -Im.
        eps_p[i] = s.eps_star[i].real();
        eps_pp[i] = -s.eps_star[i].imag();
    }
    write_csv(path,
              {"f_Hz", "ReZ_ohm", "ImZ_ohm", "absZ_ohm", "phase_deg",
               "Re_sigma_eff", "Im_sigma_eff", "eps_prime", "eps_doubleprime"},
              {s.f, re_z, im_z, abs_z, phase, re_sig, im_sig, eps_p, eps_pp});
}

/// Bode (f, |Z|, phase) and Cole–Cole (Re Z, -Im Z) companion files.
inline void emit_bode_cole(const Spectrum& s, const std::string& bode_path,
                           const std::string& cole_path)
{
    const std::size_t m = s.f.size();
    std::vector<double> abs_z(m), phase(m), re_z(m), neg_im_z(m);
    for (std::size_t i = 0; i < m; ++i) {
        abs_z[i] = std::abs(s.Z[i]);
        phase[i] = std::arg(s.Z[i]) * 180.0 / pi;
        re_z[i] = s.Z[i].real();
        neg_im_z[i] = -s.Z[i].imag();
    }
    write_csv(bode_path, {"f_Hz", "abs_Z_Ohm", "phase_deg"},
              {s.f, abs_z, phase});
    write_csv(cole_path, {"Re_Z_Ohm", "neg_Im_Z_Ohm"}, {re_z, neg_im_z});
}

// ----------------------------------------------------------------------------
//  Preset experiment families
// ----------------------------------------------------------------------------

namespace detail {

inline std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

inline std::vector<double> geomspace(double a, double b, std::size_t n)
{
    std::vector<double> v(n);
    const double la = std::log(a), lb = std::log(b);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::exp(la + (lb - la) * static_cast<double>(i)
                                 / static_cast<double>(n - 1));
    return v;
}

} // namespace detail

inline const std::vector<std::string>& preset_ids()
{
    static const std::vector<std::string> ids = {"I",  "II",  "III", "IV",
                                                 "V",  "VI",  "VII", "VIII"};
    return ids;
}

/// Configurations of the standard experiment families.  I-IV are single
/// runs; V-VIII sweep one parameter over 10 values.  The spectrum variant
/// uses the short pulse sized for the wide-band transform; the time-domain
/// variant uses the long pulse and a window that shows the full relaxation.
inline std::vector<ExperimentConfig> preset_configs(const std::string& id,
                                                    bool spectrum_variant = true)
{
    MediumParams base;
    base.sigma_c = 1.3;
    base.sigma_e = 0.6;
    base.S_L = 1.9;
    base.C_m = 0.01;
    base.R = 7e-6;
    base.phi = 0.3;

    const double E0 = 4e4;
    auto make = [&](MediumParams m, double alpha, const std::string& label,
                    const std::string& key, double value) {
        ExperimentConfig c;
        c.id = label;
        c.medium = m;
        c.alpha = alpha;
        if (spectrum_variant) {
            c.t_f = 0.3e-6;
            c.t_record = 25e-6;
            c.want_spectrum = true;
        } else {
            c.t_f = 20e-6;
            c.t_record = 40e-6;
            c.want_spectrum = false;
        }
        c.drive = DriveSignal::gaussian_pulse(E0, c.t_f);
        c.sweep_key = key;
        c.sweep_value = value;
        return c;
    };

    std::vector<ExperimentConfig> out;
    if (id == "I") {
        out.push_back(make(base, 1.0, "I", "", 0.0));
    } else if (id == "II") {
        MediumParams m = base;
        m.sigma_c = 0.6;
        m.sigma_e = 1.3;
        out.push_back(make(m, 1.0, "II", "", 0.0));
    } else if (id == "III") {
        MediumParams m = base;
        m.S_L = 1.9e5;
        out.push_back(make(m, 1.0, "III", "", 0.0));
    } else if (id == "IV") {
        MediumParams m = base;
        m.S_L = 1.9e5;
        m.phi = 0.6;
        out.push_back(make(m, 1.0, "IV", "", 0.0));
    } else if (id == "V") {
        const auto phis = detail::linspace(0.01, 0.8, 10);
        for (std::size_t i = 0; i < phis.size(); ++i) {
            MediumParams m = base;
            m.sigma_c = 0.6;
            m.sigma_e = 1.3;
            m.phi = phis[i];
            out.push_back(make(m, 1.0, "V_" + std::to_string(i + 1), "phi",
                               phis[i]));
        }
    } else if (id == "VI") {
        const auto sigmas = detail::linspace(0.5, 1.5, 10);
        for (std::size_t i = 0; i < sigmas.size(); ++i) {
            MediumParams m = base;
            m.sigma_c = 1.0;
            m.sigma_e = sigmas[i];
            out.push_back(make(m, 1.0, "VI_" + std::to_string(i + 1), "sigma_e",
                               sigmas[i]));
        }
    } else if (id == "VII") {
        const auto sls = detail::geomspace(1.9, 1.9e5, 10);
        for (std::size_t i = 0; i < sls.size(); ++i) {
            MediumParams m = base;
            m.sigma_c = 0.6;
            m.sigma_e = 1.3;
            m.S_L = sls[i];
            out.push_back(make(m, 1.0, "VII_" + std::to_string(i + 1), "S_L",
                               sls[i]));
        }
    } else if (id == "VIII") {
        const auto alphas = detail::linspace(0.9, 1.1, 10);
        MediumParams m = base;
        m.sigma_c = 0.6;
        m.sigma_e = 1.3;
        for (std::size_t i = 0; i < alphas.size(); ++i)
            out.push_back(make(m, alphas[i], "VIII_" + std::to_string(i + 1),
                               "alpha", alphas[i]));
    } else {
        throw parameter_error("preset_configs: unknown preset '" + id + "'");
    }
    return out;
}

} // namespace aggpol

#endif // AGGPOL_SPECTRO_HPP
