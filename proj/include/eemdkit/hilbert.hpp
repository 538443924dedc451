#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace eemdkit {

/// Discrete analytic signal: FFT, keep DC (and Nyquist for even N), double
/// the positive frequencies, zero the negative ones, inverse FFT. The real
/// part reproduces `x`. Callers should remove the mean first.
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

/// Phase of `z` with 2*pi jumps removed; consecutive samples never differ by
/// more than pi.
std::vector<double> unwrapped_phase(std::span<const std::complex<double>> z);

struct InstantaneousProfile {
    std::vector<double> amplitude; ///< signal units
    std::vector<double> frequency; ///< cycles per sample
    /// False for the first and last two samples, where the transform's
    /// periodic wrap-around distorts the estimate.
    std::vector<bool> reliable;
};

/// Amplitude is |z|; frequency is the unwrapped phase derivative over 2*pi,
/// central differences inside and one-sided differences at the ends.
InstantaneousProfile instantaneous_profile(std::span<const std::complex<double>> z);

/// Version string of the FFT backend.
std::string fft_backend_version();

} // namespace eemdkit
