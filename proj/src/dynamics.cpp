#include "shdr/dynamics.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <vector>

#include <fftw3.h>

#include "shdr/error.hpp"

namespace shdr {

std::vector<double> power_spectrum(std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    if (n < 4) throw Error(ErrorCode::ShortSeries, "need at least 4 samples for a spectrum");
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    std::vector<double> in(x.begin(), x.end());
    for (double& v : in) v -= mean;
    const int bins = n / 2 + 1;
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(bins)));
    // FFTW's planner is not thread-safe; ESTIMATE plans are cheap enough to build per call.
    static std::mutex planner;
    fftw_plan plan;
    {
        std::lock_guard lock(planner);
        plan = fftw_plan_dft_r2c_1d(n, in.data(), out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::vector<double> power(static_cast<std::size_t>(bins));
    for (int k = 0; k < bins; ++k) power[static_cast<std::size_t>(k)] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    {
        std::lock_guard lock(planner);
        fftw_destroy_plan(plan);
    }
    fftw_free(out);
    return power;
}

double dominant_period(std::span<const double> x, double dt) {
    const auto power = power_spectrum(x);
    const auto peak = std::max_element(power.begin() + 1, power.end());
    if (*peak <= 0.0) throw Error(ErrorCode::ConstantSeries, "series has no oscillatory component");
    const auto k = static_cast<std::size_t>(peak - power.begin());
    double shift = 0.0;
    if (k + 1 < power.size()) {
        const double a = power[k - 1], b = power[k], c = power[k + 1];
        const double denom = a - 2.0 * b + c;
        if (denom != 0.0) shift = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    }
    const double freq_bin = static_cast<double>(k) + shift;
    return static_cast<double>(x.size()) * dt / freq_bin;
}

}  // namespace shdr
