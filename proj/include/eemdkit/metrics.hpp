#pragma once

#include "eemdkit/emd.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eemdkit {

/// Samples per cycle: N / number of local maxima. nullopt without peaks.
std::optional<double> mean_period(std::span<const double> imf);

/// Product-moment correlation. nullopt when either input is constant.
/// Throws ValidationError on length mismatch or fewer than 3 samples.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

/// Kendall tau-b in O(n log n) (Knight's merge-sort count). nullopt when
/// either input is entirely tied.
std::optional<double> kendall_tau(std::span<const double> a, std::span<const double> b);

/// A correlation estimate with its two-sided p-value. The p-values are
/// large-sample approximations: Student t with n-2 degrees of freedom for
/// Pearson, tie-corrected normal approximation for Kendall.
struct CorrelationTest {
    double estimate = 0.0;
    double p_value = 1.0;
};

std::optional<CorrelationTest> pearson_test(std::span<const double> a, std::span<const double> b);
std::optional<CorrelationTest> kendall_test(std::span<const double> a, std::span<const double> b);

/// var(c_j) / sum_k var(c_k) * 100 over the IMFs (residue excluded).
/// Throws NumericalError when every IMF has zero variance.
std::vector<double> variance_share(const Decomposition& d);

enum class Horizon { short_run, medium_run, long_run };
std::string to_string(Horizon h);

/// Index rule: IMFs 1-2 short, the last IMF long (when there are at least
/// three), everything between medium.
Horizon horizon_group(std::size_t imf_index, std::size_t total_imfs);

/// Period rule for daily data: up to `short_max` samples short, above
/// `long_min` long. An IMF without peaks counts as long.
struct PeriodThresholds {
    double short_max = 10.0;
    double long_min = 60.0;
};
Horizon horizon_by_period(std::optional<double> mean_period, const PeriodThresholds& th = {});

enum class HorizonRule { by_index, by_period };
HorizonRule parse_horizon_rule(std::string_view text);

struct ImfFeatureRow {
    std::size_t imf_index = 0;
    std::optional<double> mean_period;
    std::optional<double> pearson;
    std::optional<double> kendall;
    double variance_share = 0.0; ///< percent
    Horizon horizon = Horizon::short_run;
    std::optional<double> pearson_p;
    std::optional<double> kendall_p;
};

/// One feature row per IMF, correlations taken against `original`.
std::vector<ImfFeatureRow> imf_features(const Decomposition& d, std::span<const double> original,
                                        HorizonRule rule = HorizonRule::by_index);

} // namespace eemdkit
