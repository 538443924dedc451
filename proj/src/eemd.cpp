#include "eemdkit/eemd.hpp"

#include "eemdkit/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace eemdkit {

namespace {

constexpr const char* kModule = "eemd-ensemble";

double sample_std(std::span<const double> x) {
    if (x.size() < 2)
        return 0.0;
    double mean = 0.0;
    for (double v : x)
        mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x)
        ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

struct TrialResult {
    std::vector<Imf> imfs;
};

} // namespace

void EemdConfig::validate() const {
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
        throw ValidationError(kModule, "noise_std must be non-negative");
    if (ensemble_size < 1)
        throw ValidationError(kModule, "ensemble_size must be at least 1");
    sift.validate();
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::size_t trial) {
    const auto t = static_cast<std::uint64_t>(trial);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
    return std::mt19937_64(seq);
}

std::vector<double> generate_noise(std::size_t length, double std, std::mt19937_64& stream) {
    if (!(std >= 0.0))
        throw ValidationError(kModule, "noise standard deviation must be non-negative");
    std::vector<double> out(length, 0.0);
    if (std == 0.0)
        return out;
    std::normal_distribution<double> normal(0.0, std);
    for (auto& v : out)
        v = normal(stream);
    return out;
}

Decomposition eemd(std::span<const double> x, const EemdConfig& config) {
    config.validate();
    if (x.size() < 4)
        throw ValidationError(kModule, "eemd needs at least 4 samples, got " + std::to_string(x.size()));

    const std::size_t n = x.size();
    const std::size_t trials = config.ensemble_size;
    const double amplitude = config.noise_std * sample_std(x);

    std::vector<TrialResult> results(trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_trial = trials;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= trials)
                return;
            try {
                auto stream = trial_stream(config.seed, i);
                std::vector<double> noisy = generate_noise(n, amplitude, stream);
                for (std::size_t t = 0; t < n; ++t)
                    noisy[t] = x[t] + noisy[t];
                results[i].imfs = emd(std::span<const double>(noisy), config.sift).imfs;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (i < failed_trial) {
                    failed_trial = i;
                    failure = std::current_exception();
                }
            }
        }
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < threads; ++k)
            pool.emplace_back(worker);
    }

    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw NumericalError(kModule, "trial " + std::to_string(failed_trial + 1) + " failed: " + e.what());
        }
    }

    std::size_t k = 0;
    for (const auto& r : results)
        k = std::max(k, r.imfs.size());

    Decomposition d;
    d.method = Method::eemd;
    d.sift = config.sift;
    d.eemd = config;
    d.trial_coverage.assign(k, 0);
    d.trial_converged.assign(k, 0);
    d.imfs.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        d.imfs[j].index = j + 1;
        d.imfs[j].values.assign(n, 0.0);
    }
    // Fixed trial-index order keeps the sums bit-reproducible.
    for (const auto& r : results) {
        for (std::size_t j = 0; j < r.imfs.size(); ++j) {
            auto& acc = d.imfs[j].values;
            if (d.trial_coverage[j] == 0)
                acc = r.imfs[j].values;
            else
                for (std::size_t t = 0; t < n; ++t)
                    acc[t] += r.imfs[j].values[t];
            ++d.trial_coverage[j];
            if (r.imfs[j].converged)
                ++d.trial_converged[j];
        }
    }
    const auto denom = static_cast<double>(trials);
    for (std::size_t j = 0; j < k; ++j) {
        for (auto& v : d.imfs[j].values)
            v /= denom;
        d.imfs[j].converged = d.trial_converged[j] == d.trial_coverage[j];
    }

    // Residue closes the decomposition; subtracting in extraction order
    // matches plain EMD's arithmetic exactly when there is no noise.
    d.residue.assign(x.begin(), x.end());
    for (const auto& imf : d.imfs)
        for (std::size_t t = 0; t < n; ++t)
            d.residue[t] -= imf.values[t];
    return d;
}

Decomposition eemd(const TimeSeries& x, const EemdConfig& config) {
    x.validate();
    Decomposition d = eemd(std::span<const double>(x.values), config);
    d.source = x.name;
    d.dates = x.dates;
    return d;
}

} // namespace eemdkit
