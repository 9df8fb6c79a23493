#ifndef AGGPOL_LANGEVIN_HPP
#define AGGPOL_LANGEVIN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "aggpol/drive.hpp"
#include "aggpol/errors.hpp"
#include "aggpol/pearson.hpp"
#include "aggpol/rng.hpp"

namespace aggpol {

// ============================================================================
//  Monte Carlo Langevin oracle
//
//  Simulates the scalar polarization SDE for an ensemble and reduces it to
//  empirical moments and histograms.  This is the model's ground truth: the
//  Fokker–Planck stationary density and the moment ODEs are validated
//  against it, never the other way around.
// ============================================================================

enum class SdeScheme {
    euler_ito,          ///< Euler–Maruyama on the chi-corrected Ito drift
    heun_stratonovich,  ///< Heun predictor-corrector on the Stratonovich form
};

struct EnsembleConfig {
    std::size_t n_traj = 1;
    double dt = 0.0;            ///< s; <= 0 selects the default 0.02/gamma_bar
    std::uint64_t seed = 0;
    NoiseParams noise{};
    DriveSignal drive{};        ///< u(t) in A/mm^2
    double t_end = 0.0;
    std::size_t record_stride = 1;
    SdeScheme scheme = SdeScheme::euler_ito;
    unsigned threads = 1;

    void validate() const
    {
        noise.validate();
        drive.validate();
        if (n_traj < 1)
            throw parameter_error("EnsembleConfig: n_traj must be at least 1");
        if (!(t_end > 0.0))
            throw parameter_error("EnsembleConfig: t_end must be positive");
        if (record_stride < 1)
            throw parameter_error("EnsembleConfig: record_stride must be at least 1");
    }
};

struct EnsembleSeries {
    std::vector<double> t;
    std::vector<double> mean, se_mean;
    std::vector<double> variance, se_variance;
    std::vector<double> final_samples; ///< ensemble state at t_end
};

/// Ito-equivalent drift and diffusion amplitude of the polarization SDE.
/// The radicand is a nonnegative quadratic form for |epsilon| <= 1; tiny
/// negative roundoff is clamped, anything beyond that is a real bug upstream.
inline std::pair<double, double> drift_diffusion(double x, double u,
                                                 const NoiseParams& n)
{
    const double g2 = n.gamma_prime * n.gamma_prime;
    const double cross = n.epsilon * n.gamma_prime * n.alpha_prime * u;
    const double drift = -(n.gamma_bar * x + n.alpha_bar * u)
                         + 0.5 * n.chi * (g2 * x + cross);

    double radicand = g2 * x * x + 2.0 * cross * x
                      + n.alpha_prime * n.alpha_prime * u * u;
    const double scale = g2 * x * x + std::abs(2.0 * cross * x)
                         + n.alpha_prime * n.alpha_prime * u * u;
    if (radicand < 0.0) {
        if (radicand < -1e-14 * scale)
            throw numeric_error("drift_diffusion: negative diffusion radicand "
                                "(internal inconsistency)");
        radicand = 0.0;
    }
    return {drift, std::sqrt(radicand)};
}

/// One Euler–Maruyama step of the whole ensemble (time-major form).
/// Trajectory index = position in x; step_index addresses the noise.
inline void step(std::vector<double>& x, double u, double dt,
                 const NoiseParams& n, std::uint64_t seed,
                 std::uint32_t step_index)
{
    if (!(dt > 0.0))
        throw parameter_error("step: dt must be positive");
    const double sqdt = std::sqrt(dt);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto [b, g] = drift_diffusion(x[i], u, n);
        const double z =
            rng::normal_pair(seed, static_cast<std::uint32_t>(i), step_index).first;
        x[i] += b * dt + g * sqdt * z;
    }
}

namespace detail {

/// Stratonovich drift: the Ito chi-correction removed entirely.
inline double strat_drift(double x, double u, const NoiseParams& n)
{
    return -(n.gamma_bar * x + n.alpha_bar * u);
}

inline double diffusion_amp(double x, double u, const NoiseParams& n)
{
    return drift_diffusion(x, u, n).second;
}

struct RecordSums {
    std::vector<double> s1, s2, s3, s4; // power sums per record index
    void init(std::size_t m)
    {
        s1.assign(m, 0.0);
        s2.assign(m, 0.0);
        s3.assign(m, 0.0);
        s4.assign(m, 0.0);
    }
    void add(std::size_t i, double x)
    {
        const double x2 = x * x;
        s1[i] += x;
        s2[i] += x2;
        s3[i] += x2 * x;
        s4[i] += x2 * x2;
    }
    void merge(const RecordSums& o)
    {
        for (std::size_t i = 0; i < s1.size(); ++i) {
            s1[i] += o.s1[i];
            s2[i] += o.s2[i];
            s3[i] += o.s3[i];
            s4[i] += o.s4[i];
        }
    }
};

} // namespace detail

/// Simulate the ensemble and record empirical moments every record_stride
/// steps.  Deterministic for a given seed regardless of thread count: each
/// trajectory owns a counter-based stream, and partial sums are merged in
/// fixed chunk order.
inline EnsembleSeries run_ensemble(const EnsembleConfig& cfg)
{
    cfg.validate();
    const double dt = cfg.dt > 0.0 ? cfg.dt : 0.02 / cfg.noise.gamma_bar;
    const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
    const std::size_t n_rec = n_steps / cfg.record_stride + 1;

    // Record times (step 0 = initial condition, then every stride).
    std::vector<std::size_t> rec_steps;
    rec_steps.reserve(n_rec + 1);
    for (std::size_t s = 0; s <= n_steps; s += cfg.record_stride)
        rec_steps.push_back(s);
    if (rec_steps.back() != n_steps)
        rec_steps.push_back(n_steps);

    // Drive values at step times (shared, precomputed).
    std::vector<double> u_at(n_steps + 1);
    for (std::size_t s = 0; s <= n_steps; ++s)
        u_at[s] = cfg.drive(static_cast<double>(s) * dt);

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_thread = std::min<unsigned>(
        cfg.threads > 0 ? cfg.threads : hw,
        static_cast<unsigned>(std::min<std::size_t>(cfg.n_traj, 64)));

    std::vector<double> final_samples(cfg.n_traj, 0.0);
    std::vector<detail::RecordSums> partials(n_thread);

    auto worker = [&](unsigned w, std::size_t lo, std::size_t hi) {
        auto& sums = partials[w];
        sums.init(rec_steps.size());
        const double sqdt = std::sqrt(dt);
        for (std::size_t traj = lo; traj < hi; ++traj) {
            double x = 0.0;
            std::size_t next_rec = 0;
            for (std::size_t s = 0; s <= n_steps; ++s) {
                if (next_rec < rec_steps.size() && rec_steps[next_rec] == s) {
                    sums.add(next_rec, x);
                    ++next_rec;
                }
                if (s == n_steps)
                    break;
                const double u = u_at[s];
                const double z = rng::normal_pair(cfg.seed,
                                                  static_cast<std::uint32_t>(traj),
                                                  static_cast<std::uint32_t>(s))
                                     .first;
                if (cfg.scheme == SdeScheme::euler_ito) {
                    const auto [b, g] = drift_diffusion(x, u, cfg.noise);
                    x += b * dt + g * sqdt * z;
                } else {
                    const double dW = sqdt * z;
                    const double b0 = detail::strat_drift(x, u, cfg.noise);
                    const double g0 = detail::diffusion_amp(x, u, cfg.noise);
                    const double xp = x + b0 * dt + g0 * dW;
                    const double b1 = detail::strat_drift(xp, u, cfg.noise);
                    const double g1 = detail::diffusion_amp(xp, u, cfg.noise);
                    x += 0.5 * (b0 + b1) * dt + 0.5 * (g0 + g1) * dW;
                }
            }
            final_samples[traj] = x;
        }
    };

    if (n_thread == 1) {
        worker(0, 0, cfg.n_traj);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (cfg.n_traj + n_thread - 1) / n_thread;
        for (unsigned w = 0; w < n_thread; ++w) {
            const std::size_t lo = std::min<std::size_t>(w * chunk, cfg.n_traj);
            const std::size_t hi = std::min<std::size_t>(lo + chunk, cfg.n_traj);
            pool.emplace_back(worker, w, lo, hi);
        }
        for (auto& th : pool)
            th.join();
    }
    for (unsigned w = 1; w < n_thread; ++w)
        partials[0].merge(partials[w]);
    const auto& sums = partials[0];

    EnsembleSeries out;
    const auto n = static_cast<double>(cfg.n_traj);
    out.t.reserve(rec_steps.size());
    for (std::size_t i = 0; i < rec_steps.size(); ++i) {
        out.t.push_back(static_cast<double>(rec_steps[i]) * dt);
        const double m1 = sums.s1[i] / n;
        const double m2 = sums.s2[i] / n - m1 * m1;
        const double m3 = sums.s3[i] / n - 3.0 * m1 * sums.s2[i] / n + 2.0 * m1 * m1 * m1;
        const double m4 = sums.s4[i] / n - 4.0 * m1 * sums.s3[i] / n
                          + 6.0 * m1 * m1 * sums.s2[i] / n - 3.0 * m1 * m1 * m1 * m1;
        (void)m3;
        const double var_unbiased = n > 1.0 ? m2 * n / (n - 1.0) : 0.0;
        out.mean.push_back(m1);
        out.se_mean.push_back(n > 1.0 ? std::sqrt(std::max(0.0, var_unbiased) / n) : 0.0);
        out.variance.push_back(var_unbiased);
        // SE of the sample variance from the fourth moment.
        const double se_var2 = (m4 - (n - 3.0) / (n - 1.0) * m2 * m2) / n;
        out.se_variance.push_back(std::sqrt(std::max(0.0, se_var2)));
    }
    out.final_samples = std::move(final_samples);
    return out;
}

/// Fit Pearson parameters to raw samples by the method of moments
/// (bias-corrected variance, plain higher central moments).
inline PearsonParams empirical_fit(const std::vector<double>& samples)
{
    const std::size_t n = samples.size();
    if (n < 4)
        throw parameter_error("empirical_fit: need at least 4 samples");
    if (n < 10000)
        std::cerr << "empirical_fit: warning: only " << n
                  << " samples; moment fit below the recommended 1e4\n";

    double mean = 0.0;
    for (double x : samples)
        mean += x;
    mean /= static_cast<double>(n);

    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    const auto dn = static_cast<double>(n);
    const double mu2 = s2 / (dn - 1.0);
    const double mu3 = s3 / dn;
    const double mu4 = s4 / dn;
    if (!(mu2 > 0.0))
        throw numeric_error("empirical_fit: not Pearson IV (zero sample variance)");

    return fit_moments({mean, mu2, mu3, mu4});
}

/// Kolmogorov–Smirnov distance between samples and the stationary density.
/// The model CDF comes from a dense trapezoid grid over lambda +/- 60 a —
/// ample for the exponents arising here (tail mass beyond is negligible for
/// nu > ~2).
inline double ks_distance(std::vector<double> samples, const PearsonParams& p)
{
    p.validate();
    if (samples.empty())
        throw parameter_error("ks_distance: empty sample set");
    std::sort(samples.begin(), samples.end());

    const std::size_t grid_n = 1 << 18;
    const double lo = p.lambda - 60.0 * p.a;
    const double hi = p.lambda + 60.0 * p.a;
    const double dx = (hi - lo) / static_cast<double>(grid_n);

    std::vector<double> cdf(grid_n + 1, 0.0);
    double prev = stationary_density(p, lo);
    for (std::size_t i = 1; i <= grid_n; ++i) {
        const double cur = stationary_density(p, lo + static_cast<double>(i) * dx);
        cdf[i] = cdf[i - 1] + 0.5 * (prev + cur) * dx;
        prev = cur;
    }
    const double total = cdf[grid_n];
    for (auto& v : cdf)
        v /= total;

    auto model_cdf = [&](double x) {
        if (x <= lo)
            return 0.0;
        if (x >= hi)
            return 1.0;
        const double s = (x - lo) / dx;
        const auto i = static_cast<std::size_t>(s);
        const double w = s - static_cast<double>(i);
        return cdf[i] * (1.0 - w) + cdf[i + 1] * w;
    };

    const auto n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = model_cdf(samples[i]);
        const double hi_emp = static_cast<double>(i + 1) / n;
        const double lo_emp = static_cast<double>(i) / n;
        d = std::max(d, std::max(hi_emp - F, F - lo_emp));
    }
    return d;
}

} // namespace aggpol

#endif // AGGPOL_LANGEVIN_HPP
