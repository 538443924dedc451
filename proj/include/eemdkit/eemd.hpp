#pragma once

#include "eemdkit/emd.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace eemdkit {

/// Private random stream for one ensemble trial, derived from (seed, trial).
std::mt19937_64 trial_stream(std::uint64_t seed, std::size_t trial);

/// i.i.d. N(0, std^2) draws. `std == 0` yields zeros without touching the stream.
std::vector<double> generate_noise(std::size_t length, double std, std::mt19937_64& stream);

/// Ensemble EMD: each trial decomposes x plus white Gaussian noise of
/// standard deviation `noise_std * sd(x)`; IMF j is the trial mean of the
/// trials' IMF j (missing trailing IMFs count as zero) and the residue is
/// x minus the ensemble IMFs. Trials run in parallel but are reduced in
/// trial order, so the result is bit-identical for any thread count.
Decomposition eemd(std::span<const double> x, const EemdConfig& config);
Decomposition eemd(const TimeSeries& x, const EemdConfig& config);

} // namespace eemdkit
