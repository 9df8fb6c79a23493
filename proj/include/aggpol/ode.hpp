#ifndef AGGPOL_ODE_HPP
#define AGGPOL_ODE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "aggpol/errors.hpp"

namespace aggpol {

// ============================================================================
//  Embedded Dormand-Prince 5(4) integrator with PI step-size control
//
//  FSAL pair; the controller follows the classic 0.7/5, 0.4/5 PI exponents.
//  The object keeps its step size across advance() calls so a caller can
//  sample a trajectory at many output times without re-warming the
//  controller; reset() discards that state (used at drive discontinuities).
// ============================================================================

template <std::size_t N, typename RHS>
class DormandPrince {
public:
    DormandPrince(RHS f, double rtol, double atol)
        : f_(f), rtol_(rtol), atol_(atol)
    {
        if (!(rtol > 0.0) || !(atol > 0.0))
            throw parameter_error("DormandPrince: tolerances must be positive");
    }

    /// Forget controller state (step size, FSAL cache).  Call when the RHS
    /// is about to be discontinuous, e.g. at a step-drive switch time.
    void reset() { h_ = 0.0; err_prev_ = 1.0; have_k1_ = false; }

    /// Advance y in place from t to t_end (t_end > t), adapting internally.
    void advance(double& t, std::array<double, N>& y, double t_end)
    {
        using state = std::array<double, N>;
        if (!(t_end > t))
            return;

        if (h_ == 0.0)
            h_ = initial_step(t, y, t_end);

        state k1, k2, k3, k4, k5, k6, k7, ytmp, y5;
        if (have_k1_)
            k1 = k1_cache_;
        else
            f_(t, y, k1);

        while (t < t_end) {
            const double hmin = 16.0 * std::numeric_limits<double>::epsilon()
                                * std::max(std::abs(t), std::abs(t_end));
            bool hit_end = false;
            if (h_ > t_end - t) {
                h_ = t_end - t;
                hit_end = true;
            }
            if (h_ < hmin)
                throw stiffness_error("DormandPrince: step size underflow at t = "
                                      + std::to_string(t));

            const double h = h_;

            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a21 * k1[i]);
            f_(t + c2 * h, ytmp, k2);

            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            f_(t + c3 * h, ytmp, k3);

            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f_(t + c4 * h, ytmp, k4);

            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i]
                                      + a54 * k4[i]);
            f_(t + c5 * h, ytmp, k5);

            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i]
                                      + a64 * k4[i] + a65 * k5[i]);
            f_(t + h, ytmp, k6);

            for (std::size_t i = 0; i < N; ++i)
                y5[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i]
                                    + a75 * k5[i] + a76 * k6[i]);
            f_(t + h, y5, k7);

            // Weighted rms of the embedded error estimate.
            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i]
                                       + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = atol_ + rtol_ * std::max(std::abs(y[i]),
                                                           std::abs(y5[i]));
                err += (ei / sc) * (ei / sc);
            }
            err = std::sqrt(err / static_cast<double>(N));

            if (err <= 1.0) {
                t = hit_end ? t_end : t + h;
                y = y5;
                k1 = k7; // FSAL
                const double e = std::max(err, 1e-10);
                double fac = 0.9 * std::pow(e, -0.14) * std::pow(err_prev_, 0.08);
                fac = std::min(5.0, std::max(0.2, fac));
                h_ = h * fac;
                err_prev_ = e;
            } else {
                double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
                h_ = h * std::min(1.0, fac);
            }
        }
        k1_cache_ = k1;
        have_k1_ = true;
    }

private:
    double initial_step(double t, const std::array<double, N>& y, double t_end)
    {
        // Conservative first guess from the RHS magnitude.
        std::array<double, N> dy;
        f_(t, y, dy);
        double ynorm = 0.0, dnorm = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            dnorm = std::max(dnorm, std::abs(dy[i]));
        }
        double h = (dnorm > 0.0) ? 0.01 * (ynorm + 1.0) / dnorm
                                 : 1e-3 * (t_end - t);
        return std::min(h, t_end - t);
    }

    // Dormand-Prince tableau.
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                            c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                            a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                            a76 = 11.0 / 84.0;
    // 5th-order minus 4th-order weights.
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                            e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                            e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    RHS f_;
    double rtol_, atol_;
    double h_ = 0.0;
    double err_prev_ = 1.0;
    bool have_k1_ = false;
    std::array<double, N> k1_cache_{};
};

} // namespace aggpol

#endif // AGGPOL_ODE_HPP
