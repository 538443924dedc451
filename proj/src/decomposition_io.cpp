#include "eemdkit/decomposition_io.hpp"

#include "eemdkit/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace eemdkit {

namespace {

constexpr const char* kModule = "emd-engine";
constexpr const char* kFormat = "eemdkit.decomposition/1";

std::string number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ','))
        out.push_back(f);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::size_t row, const std::filesystem::path& path) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ValidationError(kModule, path.string() + ": row " + std::to_string(row) + ": bad number '" + s + "'");
    return v;
}

} // namespace

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix) {
    return std::filesystem::path(stem.string() + suffix);
}

nlohmann::ordered_json decomposition_sidecar(const Decomposition& d, const nlohmann::ordered_json& extra) {
    nlohmann::ordered_json j;
    j["format"] = kFormat;
    j["source"] = d.source;
    j["method"] = to_string(d.method);
    j["n"] = d.size();
    j["imf_count"] = d.imfs.size();
    j["sift"] = {
        {"sd_threshold", d.sift.sd_threshold},
        {"max_sift_iters", d.sift.max_sift_iters},
        {"max_imfs", d.sift.max_imfs ? nlohmann::ordered_json(*d.sift.max_imfs) : nlohmann::ordered_json("auto")},
        {"max_imfs_resolved", d.size() ? d.sift.resolved_max_imfs(d.size()) : 0},
        {"boundary", to_string(d.sift.boundary)},
    };
    if (d.eemd) {
        j["eemd"] = {
            {"noise_std", d.eemd->noise_std},
            {"ensemble_size", d.eemd->ensemble_size},
            {"seed", d.eemd->seed},
            {"trial_coverage", d.trial_coverage},
            {"trial_converged", d.trial_converged},
        };
    }
    auto imfs = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < d.imfs.size(); ++k) {
        nlohmann::ordered_json e;
        e["index"] = d.imfs[k].index;
        e["converged"] = d.imfs[k].converged;
        if (d.method == Method::emd)
            e["sift_iterations"] = d.imfs[k].sift_iterations;
        else
            e["trial_coverage"] = d.trial_coverage[k];
        imfs.push_back(std::move(e));
    }
    j["imfs"] = std::move(imfs);
    for (const auto& [key, value] : extra.items())
        j[key] = value;
    return j;
}

void write_decomposition(const std::filesystem::path& stem, const Decomposition& d, const nlohmann::ordered_json& extra) {
    const auto csv_path = with_suffix(stem, ".csv");
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv)
        throw ValidationError(kModule, "cannot write '" + csv_path.string() + "'");
    csv << 't';
    for (const auto& imf : d.imfs)
        csv << ",imf" << imf.index;
    csv << ",residue\n";
    const bool dated = d.dates.size() == d.size();
    for (std::size_t t = 0; t < d.size(); ++t) {
        if (dated)
            csv << format_iso_date(d.dates[t]);
        else
            csv << t;
        for (const auto& imf : d.imfs)
            csv << ',' << number(imf.values[t]);
        csv << ',' << number(d.residue[t]) << '\n';
    }

    const auto json_path = with_suffix(stem, ".json");
    std::ofstream js(json_path, std::ios::binary);
    if (!js)
        throw ValidationError(kModule, "cannot write '" + json_path.string() + "'");
    js << decomposition_sidecar(d, extra).dump(2) << '\n';
}

nlohmann::ordered_json read_sidecar(const std::filesystem::path& stem) {
    const auto json_path = with_suffix(stem, ".json");
    std::ifstream js(json_path);
    if (!js)
        throw ValidationError(kModule, "missing decomposition sidecar '" + json_path.string() + "'");
    try {
        return nlohmann::ordered_json::parse(js);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(kModule, json_path.string() + ": " + e.what());
    }
}

Decomposition read_decomposition(const std::filesystem::path& stem) {
    const auto csv_path = with_suffix(stem, ".csv");
    std::ifstream csv(csv_path);
    if (!csv)
        throw ValidationError(kModule, "missing decomposition '" + csv_path.string() + "'");
    std::string line;
    if (!std::getline(csv, line))
        throw ValidationError(kModule, csv_path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = split(line);
    if (header.size() < 2 || header.front() != "t" || header.back() != "residue")
        throw ValidationError(kModule, csv_path.string() + ": header must be t,imf1..imfK,residue");
    const std::size_t k = header.size() - 2;
    for (std::size_t j = 0; j < k; ++j)
        if (header[j + 1] != "imf" + std::to_string(j + 1))
            throw ValidationError(kModule, csv_path.string() + ": unexpected column '" + header[j + 1] + "'");

    Decomposition d;
    d.imfs.resize(k);
    for (std::size_t j = 0; j < k; ++j)
        d.imfs[j].index = j + 1;
    bool dated = true;
    std::size_t row = 0;
    while (std::getline(csv, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        ++row;
        const auto f = split(line);
        if (f.size() != header.size())
            throw ValidationError(kModule, csv_path.string() + ": row " + std::to_string(row) + " has " +
                                               std::to_string(f.size()) + " fields");
        if (dated) {
            try {
                d.dates.push_back(parse_iso_date(f[0]));
            } catch (const ValidationError&) {
                if (row != 1)
                    throw ValidationError(kModule, csv_path.string() + ": row " + std::to_string(row) +
                                                       ": invalid date '" + f[0] + "'");
                dated = false;
            }
        }
        for (std::size_t j = 0; j < k; ++j)
            d.imfs[j].values.push_back(parse_number(f[j + 1], row, csv_path));
        d.residue.push_back(parse_number(f.back(), row, csv_path));
    }

    if (!std::filesystem::exists(with_suffix(stem, ".json")))
        return d;
    const auto j = read_sidecar(stem);
    try {
        d.source = j.value("source", "");
        d.method = j.value("method", "EMD") == "EEMD" ? Method::eemd : Method::emd;
        if (j.contains("sift")) {
            const auto& s = j["sift"];
            d.sift.sd_threshold = s.value("sd_threshold", d.sift.sd_threshold);
            d.sift.max_sift_iters = s.value("max_sift_iters", d.sift.max_sift_iters);
            if (s.contains("max_imfs") && s["max_imfs"].is_number_unsigned())
                d.sift.max_imfs = s["max_imfs"].get<std::size_t>();
            d.sift.boundary = parse_boundary_policy(s.value("boundary", std::string("mirror")));
        }
        if (j.contains("eemd")) {
            const auto& e = j["eemd"];
            EemdConfig cfg;
            cfg.noise_std = e.value("noise_std", cfg.noise_std);
            cfg.ensemble_size = e.value("ensemble_size", cfg.ensemble_size);
            cfg.seed = e.value("seed", cfg.seed);
            cfg.sift = d.sift;
            d.eemd = cfg;
            d.trial_coverage = e.value("trial_coverage", std::vector<std::size_t>{});
            d.trial_converged = e.value("trial_converged", std::vector<std::size_t>{});
        }
        if (j.contains("imfs")) {
            const auto& imfs = j["imfs"];
            if (imfs.size() != k)
                throw ValidationError(kModule, "sidecar lists " + std::to_string(imfs.size()) + " IMFs, CSV has " +
                                                   std::to_string(k));
            for (std::size_t i = 0; i < k; ++i) {
                d.imfs[i].converged = imfs[i].value("converged", false);
                d.imfs[i].sift_iterations = imfs[i].value("sift_iterations", std::size_t{0});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(kModule, with_suffix(stem, ".json").string() + ": " + e.what());
    }
    return d;
}

} // namespace eemdkit
