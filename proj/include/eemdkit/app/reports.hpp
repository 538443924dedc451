#pragma once

#include "eemdkit/emd.hpp"
#include "eemdkit/hilbert.hpp"
#include "eemdkit/metrics.hpp"
#include "eemdkit/regression.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace eemdkit::app {

using ordered_json = nlohmann::ordered_json;

/// Shortest round-trip decimal form.
std::string format_number(double v);

// Feature table (one row per IMF). Absent statistics are empty CSV cells and
// JSON nulls.
ordered_json features_json(const std::string& source, std::span<const ImfFeatureRow> rows, HorizonRule rule);
void write_features(const std::filesystem::path& stem, const std::string& source,
                    std::span<const ImfFeatureRow> rows, HorizonRule rule);

struct RegressionReportInfo {
    RegressionSpec spec;
    Taxonomy taxonomy = Taxonomy::sign_significance;
    std::string transform = "levels";
};

ordered_json regression_json(const RegressionReportInfo& info, std::span<const ScaleFit> fits);

/// Rows = terms plus R2, columns = IMF1..IMFK, cells "coef (p-value)".
std::string regression_table_csv(std::span<const ScaleFit> fits, const RegressionSpec& spec);

/// Writes regression.json, regression.csv and classification.csv into `dir`.
std::vector<std::filesystem::path> write_regression(const std::filesystem::path& dir, const RegressionReportInfo& info,
                                                    std::span<const ScaleFit> fits);

/// t, reliable, imf<j>_amplitude, imf<j>_frequency for every IMF (each IMF is
/// demeaned before its analytic signal is taken).
void write_hilbert(const std::filesystem::path& path, const Decomposition& d);

/// Sifting illustration: t, signal, upper, lower, mean, imf1, residual1.
/// Returns false (and writes nothing) when the signal has no oscillation.
bool write_sift_plot(const std::filesystem::path& path, const Decomposition& d);

/// Short-horizon IMFs summed against everything else: t, signal, high, low.
void write_component_plot(const std::filesystem::path& path, const Decomposition& d);

} // namespace eemdkit::app
