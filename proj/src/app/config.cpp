#include "eemdkit/app/config.hpp"

#include "eemdkit/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace eemdkit::app {

namespace {

constexpr const char* kModule = "cli-harness";

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ValidationError(kModule, "config key '" + std::string(key) + "': not a number: '" + std::string(text) + "'");
    return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ValidationError(kModule, "config key '" + std::string(key) + "': not a non-negative integer: '" +
                                           std::string(text) + "'");
    return v;
}

ScalarOrColumn parse_scalar_or_column(std::string_view text) {
    ScalarOrColumn s;
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (!text.empty() && res.ec == std::errc{} && res.ptr == text.data() + text.size())
        s.constant = v;
    else
        s.column = std::string(text);
    return s;
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view p) {
    std::filesystem::path path{std::string(p)};
    return path.is_absolute() ? path : base / path;
}

} // namespace

std::string to_string(Transform t) {
    return t == Transform::levels ? "levels" : "log";
}

Transform parse_transform(std::string_view text) {
    if (text == "levels")
        return Transform::levels;
    if (text == "log")
        return Transform::log;
    throw ValidationError(kModule, "unknown transform '" + std::string(text) + "' (expected levels|log)");
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss{std::string(text)};
    while (std::getline(ss, item, ',')) {
        auto t = trim(item);
        if (!t.empty())
            out.emplace_back(t);
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "yes" || text == "1" || text == "on")
        return true;
    if (text == "false" || text == "no" || text == "0" || text == "off")
        return false;
    throw ValidationError(kModule, "config key '" + std::string(key) + "': expected true|false, got '" +
                                       std::string(text) + "'");
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
    std::map<std::string, std::string> kv;
    std::stringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find_first_of("#;");
        std::string_view body = trim(std::string_view(line).substr(0, hash));
        if (body.empty())
            continue;
        auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError(kModule, "config line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key(trim(body.substr(0, eq)));
        std::string value(trim(body.substr(eq + 1)));
        if (key.empty())
            throw ValidationError(kModule, "config line " + std::to_string(line_no) + ": empty key");
        if (kv.count(key))
            throw ValidationError(kModule, "config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }

    RunConfig cfg;
    RegressionSpec reg;
    bool have_reg = false;
    DeflateSpec deflate;
    ForwardSpec forward;

    using Handler = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Handler> handlers = {
        {"input.files",
         [&](const std::string&, const std::string& v) {
             for (const auto& f : split_list(v))
                 cfg.input_files.push_back(resolve(base_dir, f));
         }},
        {"input.file", [&](const std::string&, const std::string& v) { cfg.input_files.push_back(resolve(base_dir, v)); }},
        {"input.columns", [&](const std::string&, const std::string& v) { cfg.columns = split_list(v); }},
        {"seed", [&](const std::string& k, const std::string& v) { cfg.eemd.seed = parse_uint(k, v); }},
        {"transform", [&](const std::string&, const std::string& v) { cfg.transform = parse_transform(v); }},
        {"method",
         [&](const std::string&, const std::string& v) {
             if (v == "emd")
                 cfg.method = Method::emd;
             else if (v == "eemd")
                 cfg.method = Method::eemd;
             else
                 throw ValidationError(kModule, "unknown method '" + v + "' (expected emd|eemd)");
         }},
        {"eemd.noise_std", [&](const std::string& k, const std::string& v) { cfg.eemd.noise_std = parse_double(k, v); }},
        {"eemd.ensemble_size",
         [&](const std::string& k, const std::string& v) { cfg.eemd.ensemble_size = parse_uint(k, v); }},
        {"eemd.threads",
         [&](const std::string& k, const std::string& v) { cfg.eemd.threads = static_cast<unsigned>(parse_uint(k, v)); }},
        {"sift.sd_threshold",
         [&](const std::string& k, const std::string& v) { cfg.eemd.sift.sd_threshold = parse_double(k, v); }},
        {"sift.max_sift_iters",
         [&](const std::string& k, const std::string& v) { cfg.eemd.sift.max_sift_iters = parse_uint(k, v); }},
        {"sift.max_imfs",
         [&](const std::string& k, const std::string& v) {
             if (v == "auto")
                 cfg.eemd.sift.max_imfs.reset();
             else
                 cfg.eemd.sift.max_imfs = parse_uint(k, v);
         }},
        {"sift.boundary", [&](const std::string&, const std::string& v) { cfg.eemd.sift.boundary = parse_boundary_policy(v); }},
        {"features.horizon", [&](const std::string&, const std::string& v) { cfg.horizon = parse_horizon_rule(v); }},
        {"regression.dependent",
         [&](const std::string&, const std::string& v) {
             reg.dependent = v;
             have_reg = true;
         }},
        {"regression.regressors", [&](const std::string&, const std::string& v) { reg.regressors = split_list(v); }},
        {"regression.lag_dependent",
         [&](const std::string& k, const std::string& v) { reg.lag_dependent = parse_uint(k, v); }},
        {"regression.alpha", [&](const std::string& k, const std::string& v) { reg.alpha = parse_double(k, v); }},
        {"regression.robust_se",
         [&](const std::string& k, const std::string& v) {
             reg.covariance = parse_bool(k, v) ? CovarianceEstimator::hc1 : CovarianceEstimator::classical;
         }},
        {"regression.taxonomy", [&](const std::string&, const std::string& v) { cfg.taxonomy = parse_taxonomy(v); }},
        {"deflate.columns", [&](const std::string&, const std::string& v) { deflate.columns = split_list(v); }},
        {"deflate.index_file", [&](const std::string&, const std::string& v) { deflate.index_file = resolve(base_dir, v); }},
        {"deflate.index_column", [&](const std::string&, const std::string& v) { deflate.index_column = v; }},
        {"forward.columns", [&](const std::string&, const std::string& v) { forward.columns = split_list(v); }},
        {"forward.rate", [&](const std::string&, const std::string& v) { forward.rate = parse_scalar_or_column(v); }},
        {"forward.storage", [&](const std::string&, const std::string& v) { forward.storage = parse_scalar_or_column(v); }},
        {"forward.convenience",
         [&](const std::string&, const std::string& v) { forward.convenience = parse_scalar_or_column(v); }},
        {"output.dir", [&](const std::string&, const std::string& v) { cfg.output_dir = resolve(base_dir, v); }},
        {"emit.features", [&](const std::string& k, const std::string& v) { cfg.emit.features = parse_bool(k, v); }},
        {"emit.regression", [&](const std::string& k, const std::string& v) { cfg.emit.regression = parse_bool(k, v); }},
        {"emit.hilbert", [&](const std::string& k, const std::string& v) { cfg.emit.hilbert = parse_bool(k, v); }},
        {"emit.plotdata", [&](const std::string& k, const std::string& v) { cfg.emit.plotdata = parse_bool(k, v); }},
    };

    for (const auto& [key, value] : kv) {
        auto h = handlers.find(key);
        if (h == handlers.end())
            throw ValidationError(kModule, "unknown config key '" + key + "'");
        h->second(key, value);
    }

    if (cfg.input_files.empty())
        throw ValidationError(kModule, "config needs input.file or input.files");
    cfg.seed_defaulted = !kv.count("seed");
    if (cfg.seed_defaulted)
        cfg.eemd.seed = kDefaultSeed;
    cfg.eemd.validate();

    if (have_reg) {
        if (reg.regressors.empty())
            throw ValidationError(kModule, "regression.regressors is required with regression.dependent");
        reg.validate();
        cfg.regression = reg;
    } else if (!reg.regressors.empty()) {
        throw ValidationError(kModule, "regression.regressors given without regression.dependent");
    }
    if (!deflate.columns.empty()) {
        if (deflate.index_file.empty() || deflate.index_column.empty())
            throw ValidationError(kModule, "deflate.columns needs deflate.index_file and deflate.index_column");
        cfg.deflate = deflate;
    }
    if (!forward.columns.empty())
        cfg.forward = forward;

    // Stable record of the effective settings (paths as written in the file).
    auto& r = cfg.resolved;
    for (const auto& [key, value] : kv)
        r[key] = value;
    r["seed"] = std::to_string(cfg.eemd.seed);
    r["method"] = to_string(cfg.method);
    r["transform"] = to_string(cfg.transform);
    r["eemd.noise_std"] = kv.count("eemd.noise_std") ? kv.at("eemd.noise_std") : "0.2";
    r["eemd.ensemble_size"] = std::to_string(cfg.eemd.ensemble_size);
    r["sift.sd_threshold"] = kv.count("sift.sd_threshold") ? kv.at("sift.sd_threshold") : "0.2";
    r["sift.max_sift_iters"] = std::to_string(cfg.eemd.sift.max_sift_iters);
    r["sift.max_imfs"] = cfg.eemd.sift.max_imfs ? std::to_string(*cfg.eemd.sift.max_imfs) : "auto";
    r["sift.boundary"] = to_string(cfg.eemd.sift.boundary);
    // Thread count and run location do not affect results, so two runs agree.
    r.erase("eemd.threads");
    r.erase("output.dir");
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError(kModule, "cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), std::filesystem::absolute(path).parent_path());
}

} // namespace eemdkit::app
