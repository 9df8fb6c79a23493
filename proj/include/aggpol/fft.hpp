#ifndef AGGPOL_FFT_HPP
#define AGGPOL_FFT_HPP

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "aggpol/errors.hpp"

namespace aggpol {
namespace detail {

inline std::mutex& fftw_plan_mutex()
{
    static std::mutex m;
    return m;
}

} // namespace detail

/// Real-to-complex forward DFT (e^{-i omega t} convention), length n/2 + 1.
/// FFTW plan creation is not thread-safe, hence the global plan lock;
/// execution itself runs unlocked.
inline std::vector<std::complex<double>> rfft(const std::vector<double>& x)
{
    if (x.size() < 2)
        throw parameter_error("rfft: need at least 2 samples");
    const std::size_t n = x.size();
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(n / 2 + 1);

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE);
    }
    if (!plan)
        throw numeric_error("rfft: FFTW plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

} // namespace aggpol

#endif // AGGPOL_FFT_HPP
