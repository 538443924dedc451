#pragma once

#include "eemdkit/emd.hpp"

#include <json.hpp>

#include <filesystem>

namespace eemdkit {

/// Sidecar content: method, sift/ensemble parameters, seed, per-IMF
/// convergence and trial coverage. `extra` keys are merged in at top level.
nlohmann::ordered_json decomposition_sidecar(const Decomposition& d,
                                             const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());

/// Writes `<stem>.csv` (t, imf1..imfK, residue) and `<stem>.json`. The t
/// column holds ISO dates when the decomposition carries them, otherwise
/// sample indices. Numbers use shortest round-trip formatting.
void write_decomposition(const std::filesystem::path& stem, const Decomposition& d,
                         const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());

/// Reads a decomposition written by `write_decomposition`. The sidecar is
/// optional; without it only values and dates are restored.
Decomposition read_decomposition(const std::filesystem::path& stem);

/// Reads only the sidecar JSON of a stored decomposition.
nlohmann::ordered_json read_sidecar(const std::filesystem::path& stem);

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix);

} // namespace eemdkit
