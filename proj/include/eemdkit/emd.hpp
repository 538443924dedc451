#pragma once

#include "eemdkit/series.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eemdkit {

/// How envelope knots are extended past the first and last extrema.
enum class BoundaryPolicy {
    mirror, ///< reflect the two nearest extrema of each kind about the boundary
    clamp,  ///< pin both envelopes to the end samples
};

std::string to_string(BoundaryPolicy p);
BoundaryPolicy parse_boundary_policy(std::string_view text);

struct SiftConfig {
    /// Cauchy-type stopping threshold: sum((h_prev - h)^2) / sum(h_prev^2).
    double sd_threshold = 0.2;
    std::size_t max_sift_iters = 100;
    /// Unset means automatic: floor(log2(N)) - 1.
    std::optional<std::size_t> max_imfs;
    BoundaryPolicy boundary = BoundaryPolicy::mirror;

    void validate() const;
    std::size_t resolved_max_imfs(std::size_t n) const;
};

struct Extremum {
    std::size_t index;
    double value;
};

struct Extrema {
    std::vector<Extremum> maxima;
    std::vector<Extremum> minima;

    std::size_t count() const noexcept { return maxima.size() + minima.size(); }
};

/// Interior strict local extrema. A flat run counts once, at its (floor)
/// midpoint, and only when both neighbours lie on the same side of it.
Extrema find_extrema(std::span<const double> x);

/// Strict sign changes between consecutive samples; an exact zero keeps the
/// sign of the sample before it.
std::size_t count_zero_crossings(std::span<const double> x);

enum class EnvelopeSide { upper, lower };

/// Cubic-spline envelope through the extrema of one side, after boundary
/// extension, sampled at every index of `x`. Returns nullopt when fewer than
/// two knots remain ("no oscillation").
std::optional<std::vector<double>> envelope(std::span<const double> x, const Extrema& extrema, EnvelopeSide side,
                                            BoundaryPolicy boundary);

struct Envelopes {
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<double> mean;
};

/// Both envelopes and their mean; nullopt unless `x` has at least one interior
/// maximum and one interior minimum.
std::optional<Envelopes> envelopes(std::span<const double> x, BoundaryPolicy boundary);

struct SiftStep {
    std::vector<double> candidate;     ///< x - mean envelope
    std::vector<double> envelope_mean; ///< (upper + lower) / 2
};

/// One sifting pass. nullopt signals a monotone residue (too few extrema).
std::optional<SiftStep> sift_once(std::span<const double> x, const SiftConfig& config);

struct Imf {
    std::vector<double> values;
    std::size_t index = 1; ///< 1-based extraction order
    std::size_t sift_iterations = 0;
    bool converged = false;
};

/// Repeats `sift_once` until the Cauchy criterion and the
/// zero-crossing/extrema rule both hold, or `max_sift_iters` is reached (the
/// candidate is then returned with `converged == false`). nullopt when `x`
/// cannot be sifted at all.
std::optional<Imf> extract_imf(std::span<const double> x, const SiftConfig& config);

enum class Method { emd, eemd };
std::string to_string(Method m);

struct EemdConfig {
    double noise_std = 0.2; ///< in units of the input's sample standard deviation
    std::size_t ensemble_size = 100;
    std::uint64_t seed = 42;
    SiftConfig sift;
    unsigned threads = 0; ///< 0 = hardware concurrency; results never depend on it

    void validate() const;
};

struct Decomposition {
    std::vector<Imf> imfs; ///< high frequency first
    std::vector<double> residue;
    Method method = Method::emd;
    SiftConfig sift;
    std::optional<EemdConfig> eemd;
    /// EEMD only: number of trials that produced IMF j, and how many of those
    /// trials converged on it.
    std::vector<std::size_t> trial_coverage;
    std::vector<std::size_t> trial_converged;
    /// Provenance, empty for raw vectors.
    std::string source;
    std::vector<Date> dates;

    std::size_t size() const noexcept { return residue.size(); }
    /// Sum of all IMFs plus the residue.
    std::vector<double> reconstruct() const;
};

/// Empirical mode decomposition by repeated IMF extraction. Stops when the
/// residue has fewer than three interior extrema, has shrunk to rounding
/// level (1e-10 of the input's peak), or `max_imfs` is reached.
Decomposition emd(std::span<const double> x, const SiftConfig& config);
Decomposition emd(const TimeSeries& x, const SiftConfig& config);

/// Orthogonality index |sum_t sum_{j != k} c_j c_k| / sum_t x^2 over the IMFs.
double orthogonality_index(const Decomposition& d, std::span<const double> x);

} // namespace eemdkit
