#pragma once

#include "eemdkit/app/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace eemdkit::app {

namespace fs = std::filesystem;

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

struct DecomposeArgs {
    fs::path input;
    std::vector<std::string> columns; ///< empty: every value column
    Method method = Method::eemd;
    EemdConfig eemd;
    Transform transform = Transform::levels;
    fs::path out = ".";
};

/// One `<column>.csv` + `<column>.json` per column. Returns the stems.
std::vector<fs::path> run_decompose(const DecomposeArgs& args);

struct FeaturesArgs {
    fs::path from;                    ///< directory holding decompositions
    std::vector<std::string> columns; ///< empty: every decomposition in `from`
    HorizonRule horizon = HorizonRule::by_index;
    fs::path out;                     ///< empty: same as `from`
};

/// Writes `<column>_features.csv/.json`. The original series is rebuilt from
/// the decomposition (IMFs plus residue).
std::vector<fs::path> run_features(const FeaturesArgs& args);

struct RegressArgs {
    RegressionSpec spec;
    Taxonomy taxonomy = Taxonomy::sign_significance;
    std::optional<fs::path> from;  ///< stored decompositions
    std::optional<fs::path> input; ///< or decompose this panel first
    std::optional<Transform> transform;
    Method method = Method::eemd;
    EemdConfig eemd;
    fs::path out = ".";
};

std::vector<fs::path> run_regress(const RegressArgs& args);

struct SeriesViewArgs {
    fs::path from;
    std::vector<std::string> columns;
    fs::path out;
};

/// `<column>_hilbert.csv` per decomposition.
std::vector<fs::path> run_hilbert(const SeriesViewArgs& args);

/// `<column>_sift.csv` and `<column>_components.csv` per decomposition.
std::vector<fs::path> run_plotdata(const SeriesViewArgs& args);

struct PipelineOverrides {
    std::optional<fs::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

/// Full run described by a config file. Always leaves `manifest.json` in
/// the run directory, recording completed stages; rethrows the first failure.
fs::path run_pipeline(const fs::path& config_path, const PipelineOverrides& overrides = {});
fs::path run_pipeline(RunConfig cfg, const PipelineOverrides& overrides = {});

/// Version strings for the manifest and `--version`.
std::string version_string();

} // namespace eemdkit::app
