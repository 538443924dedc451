#pragma once

#include "eemdkit/emd.hpp"
#include "eemdkit/metrics.hpp"
#include "eemdkit/regression.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eemdkit::app {

inline constexpr std::uint64_t kDefaultSeed = 42;

enum class Transform { levels, log };
std::string to_string(Transform t);
Transform parse_transform(std::string_view text);

/// Either a constant or the name of a panel column.
struct ScalarOrColumn {
    std::optional<double> constant;
    std::string column;
};

struct DeflateSpec {
    std::vector<std::string> columns;
    std::filesystem::path index_file;
    std::string index_column;
};

struct ForwardSpec {
    std::vector<std::string> columns;
    ScalarOrColumn rate{0.0, {}};
    ScalarOrColumn storage{0.0, {}};
    ScalarOrColumn convenience{0.0, {}};
};

struct EmitFlags {
    bool features = true;
    bool regression = true;
    bool hilbert = false;
    bool plotdata = false;
};

struct RunConfig {
    std::vector<std::filesystem::path> input_files;
    std::vector<std::string> columns; ///< empty: every value column of the inputs
    Transform transform = Transform::levels;
    Method method = Method::eemd;
    EemdConfig eemd;
    bool seed_defaulted = false;
    HorizonRule horizon = HorizonRule::by_index;
    std::optional<RegressionSpec> regression;
    Taxonomy taxonomy = Taxonomy::sign_significance;
    std::optional<DeflateSpec> deflate;
    std::optional<ForwardSpec> forward;
    std::filesystem::path output_dir;
    EmitFlags emit;

    /// Resolved settings, one line per key, in a stable order; recorded in
    /// the run manifest.
    std::map<std::string, std::string> resolved;
};

/// Parses the flat `section.key = value` format. `#` and `;` start comments.
/// Relative paths resolve against `base_dir`. Unknown keys are rejected.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

std::vector<std::string> split_list(std::string_view text);
bool parse_bool(std::string_view key, std::string_view text);

} // namespace eemdkit::app
