#ifndef AGGPOL_DRIVE_HPP
#define AGGPOL_DRIVE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "aggpol/errors.hpp"

namespace aggpol {

// ============================================================================
//  Drive signals
//
//  One value type covers the three waveform families used by the experiments:
//  piecewise-constant step trains, the Gaussian pulse, and externally sampled
//  records on a uniform grid (linearly interpolated).  A zero/none kind is
//  provided so "no drive" needs no special casing.
// ============================================================================

struct DriveSignal {
    enum class Kind { none, step_train, gaussian, sampled };

    Kind kind = Kind::none;

    // step_train: value is amplitudes[k] on [times[k], times[k+1]), 0 before
    // times[0].
    std::vector<double> times;
    std::vector<double> amplitudes;

    // gaussian: E0 * exp(-6 (t - t_f/3)^2 / t_f^2)
    double E0 = 0.0;
    double t_f = 0.0;

    // sampled: uniform grid starting at t0 with spacing sample_dt
    double t0 = 0.0;
    double sample_dt = 0.0;
    std::vector<double> samples;

    static DriveSignal zero() { return {}; }

    static DriveSignal step(double amplitude, double t_on = 0.0)
    {
        DriveSignal d;
        d.kind = Kind::step_train;
        d.times = {t_on};
        d.amplitudes = {amplitude};
        return d;
    }

    static DriveSignal step_train(std::vector<double> switch_times,
                                  std::vector<double> amps)
    {
        DriveSignal d;
        d.kind = Kind::step_train;
        d.times = std::move(switch_times);
        d.amplitudes = std::move(amps);
        d.validate();
        return d;
    }

    static DriveSignal gaussian_pulse(double E0, double t_f)
    {
        if (!(t_f > 0.0))
            throw parameter_error("DriveSignal: gaussian t_f must be positive");
        DriveSignal d;
        d.kind = Kind::gaussian;
        d.E0 = E0;
        d.t_f = t_f;
        return d;
    }

    static DriveSignal sampled_grid(double dt, std::vector<double> values,
                                    double t_start = 0.0)
    {
        if (!(dt > 0.0))
            throw parameter_error("DriveSignal: sample spacing must be positive");
        DriveSignal d;
        d.kind = Kind::sampled;
        d.sample_dt = dt;
        d.samples = std::move(values);
        d.t0 = t_start;
        return d;
    }

    void validate() const
    {
        if (kind == Kind::step_train) {
            if (times.size() != amplitudes.size() || times.empty())
                throw parameter_error("DriveSignal: step train needs matching, "
                                      "non-empty times/amplitudes");
            for (std::size_t k = 1; k < times.size(); ++k)
                if (!(times[k] > times[k - 1]))
                    throw parameter_error("DriveSignal: switch times must be "
                                          "strictly increasing");
        }
        if (kind == Kind::sampled && !(sample_dt > 0.0))
            throw parameter_error("DriveSignal: sample spacing must be positive");
    }

    double operator()(double t) const
    {
        switch (kind) {
        case Kind::none:
            return 0.0;
        case Kind::step_train: {
            // Last switch time <= t wins.
            auto it = std::upper_bound(times.begin(), times.end(), t);
            if (it == times.begin())
                return 0.0;
            return amplitudes[static_cast<std::size_t>(it - times.begin()) - 1];
        }
        case Kind::gaussian: {
            const double arg = (t - t_f / 3.0) / t_f;
            return E0 * std::exp(-6.0 * arg * arg);
        }
        case Kind::sampled: {
            if (samples.empty())
                return 0.0;
            const double s = (t - t0) / sample_dt;
            if (s <= 0.0)
                return (s > -0.5) ? samples.front() : 0.0;
            const auto last = static_cast<double>(samples.size() - 1);
            if (s >= last)
                return (s < last + 0.5) ? samples.back() : 0.0;
            const auto i = static_cast<std::size_t>(s);
            const double w = s - static_cast<double>(i);
            return samples[i] * (1.0 - w) + samples[i + 1] * w;
        }
        }
        return 0.0;
    }

    /// Discontinuity times inside (t_begin, t_end); an adaptive integrator
    /// should restart at each of them.
    std::vector<double> restart_points(double t_begin, double t_end) const
    {
        std::vector<double> pts;
        if (kind == Kind::step_train)
            for (double tk : times)
                if (tk > t_begin && tk < t_end)
                    pts.push_back(tk);
        return pts;
    }
};

} // namespace aggpol

#endif // AGGPOL_DRIVE_HPP
