#include "eemdkit/hilbert.hpp"

#include "eemdkit/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>

namespace eemdkit {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (!p)
        throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

} // namespace

std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    if (n == 0)
        return out;
    if (n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
        throw ValidationError("hilbert-spectral", "signal too long for the FFT backend");
    const int len = static_cast<int>(n);

    auto buf = fftw_buffer<fftw_complex>(n);
    Plan forward, backward;
    {
        std::lock_guard lock(planner_mutex());
        forward.reset(fftw_plan_dft_1d(len, buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE));
        backward.reset(fftw_plan_dft_1d(len, buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
    }
    for (std::size_t i = 0; i < n; ++i) {
        buf[i][0] = x[i];
        buf[i][1] = 0.0;
    }
    fftw_execute(forward.get());

    // Spectral weights: 1 at DC (and Nyquist), 2 for positive, 0 for negative bins.
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < n; ++k) {
        double w = 0.0;
        if (k < (n + 1) / 2)
            w = 2.0;
        else if (n % 2 == 0 && k == half)
            w = 1.0;
        buf[k][0] *= w;
        buf[k][1] *= w;
    }
    fftw_execute(backward.get());

    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = {buf[i][0] * scale, buf[i][1] * scale};
    return out;
}

std::vector<double> unwrapped_phase(std::span<const std::complex<double>> z) {
    std::vector<double> phase(z.size());
    if (z.empty())
        return phase;
    constexpr double pi = std::numbers::pi;
    phase[0] = std::arg(z[0]);
    double offset = 0.0;
    double prev = phase[0];
    for (std::size_t i = 1; i < z.size(); ++i) {
        const double raw = std::arg(z[i]);
        const double d = raw - prev;
        double wrapped = std::remainder(d, 2.0 * pi); // in [-pi, pi]
        if (wrapped == -pi && d > 0.0)
            wrapped = pi;
        offset += wrapped - d;
        phase[i] = raw + offset;
        prev = raw;
    }
    return phase;
}

InstantaneousProfile instantaneous_profile(std::span<const std::complex<double>> z) {
    const std::size_t n = z.size();
    InstantaneousProfile p;
    p.amplitude.resize(n);
    p.frequency.assign(n, 0.0);
    p.reliable.assign(n, false);
    for (std::size_t i = 0; i < n; ++i)
        p.amplitude[i] = std::abs(z[i]);
    if (n < 2)
        return p;

    const std::vector<double> phase = unwrapped_phase(z);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    p.frequency[0] = (phase[1] - phase[0]) / two_pi;
    p.frequency[n - 1] = (phase[n - 1] - phase[n - 2]) / two_pi;
    for (std::size_t i = 1; i + 1 < n; ++i)
        p.frequency[i] = (phase[i + 1] - phase[i - 1]) / (2.0 * two_pi);
    for (std::size_t i = 2; i + 2 < n; ++i)
        p.reliable[i] = true;
    return p;
}

std::string fft_backend_version() {
    return fftw_version;
}

} // namespace eemdkit
