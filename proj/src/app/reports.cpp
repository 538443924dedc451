#include "eemdkit/app/reports.hpp"

#include "eemdkit/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eemdkit::app {

namespace {

constexpr const char* kModule = "cli-harness";

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError(kModule, "cannot write '" + path.string() + "'");
    return out;
}

std::string cell(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

ordered_json nullable(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json finite_or_null(double v) {
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

std::string t_label(const Decomposition& d, std::size_t t) {
    return d.dates.size() == d.size() ? format_iso_date(d.dates[t]) : std::to_string(t);
}

std::string covariance_name(CovarianceEstimator c) {
    return c == CovarianceEstimator::classical ? "classical" : "hc1";
}

} // namespace

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ordered_json features_json(const std::string& source, std::span<const ImfFeatureRow> rows, HorizonRule rule) {
    ordered_json j;
    j["source"] = source;
    j["imf_count"] = rows.size();
    j["horizon_rule"] = rule == HorizonRule::by_index ? "index" : "period";
    j["p_value_method"] = {{"pearson", "student-t approximation, n-2 dof"},
                           {"kendall", "normal approximation, tie-corrected variance"}};
    if (rows.empty())
        j["note"] = "decomposition has no IMFs (input without oscillation); feature table is empty";
    auto arr = ordered_json::array();
    for (const auto& r : rows) {
        arr.push_back({
            {"imf_index", r.imf_index},
            {"mean_period", nullable(r.mean_period)},
            {"pearson", nullable(r.pearson)},
            {"kendall", nullable(r.kendall)},
            {"variance_share", r.variance_share},
            {"horizon", to_string(r.horizon)},
            {"pearson_p", nullable(r.pearson_p)},
            {"kendall_p", nullable(r.kendall_p)},
        });
    }
    j["rows"] = std::move(arr);
    return j;
}

void write_features(const std::filesystem::path& stem, const std::string& source, std::span<const ImfFeatureRow> rows,
                    HorizonRule rule) {
    auto csv = open_out(stem.string() + ".csv");
    csv << "imf_index,mean_period,pearson,kendall,variance_share,horizon,pearson_p,kendall_p\n";
    for (const auto& r : rows) {
        csv << r.imf_index << ',' << cell(r.mean_period) << ',' << cell(r.pearson) << ',' << cell(r.kendall) << ','
            << format_number(r.variance_share) << ',' << to_string(r.horizon) << ',' << cell(r.pearson_p) << ','
            << cell(r.kendall_p) << '\n';
    }
    auto js = open_out(stem.string() + ".json");
    js << features_json(source, rows, rule).dump(2) << '\n';
}

ordered_json regression_json(const RegressionReportInfo& info, std::span<const ScaleFit> fits) {
    ordered_json j;
    j["dependent"] = info.spec.dependent;
    j["regressors"] = info.spec.regressors;
    j["lag_dependent"] = info.spec.lag_dependent;
    j["alpha"] = info.spec.alpha;
    j["covariance"] = covariance_name(info.spec.covariance);
    j["taxonomy"] = to_string(info.taxonomy);
    j["transform"] = info.transform;
    ordered_json scales = ordered_json::object();
    for (const auto& f : fits) {
        ordered_json s;
        s["imf_index"] = f.imf_index;
        if (!f.result) {
            s["error"] = f.error;
            scales[std::to_string(f.imf_index)] = std::move(s);
            continue;
        }
        const OlsResult& r = *f.result;
        s["n_obs"] = r.n_obs;
        s["dof"] = r.dof;
        s["r_squared"] = r.r_squared;
        auto terms = ordered_json::array();
        for (std::size_t k = 0; k < r.terms.size(); ++k) {
            terms.push_back({
                {"term", r.terms[k]},
                {"coefficient", r.coefficients[k]},
                {"std_error", r.std_errors[k]},
                {"t_stat", finite_or_null(r.t_stats[k])},
                {"p_value", finite_or_null(r.p_values[k])},
            });
        }
        s["terms"] = std::move(terms);
        auto cls = ordered_json::array();
        for (const auto& c : f.classifications) {
            cls.push_back({
                {"regressor", c.regressor},
                {"label", to_string(c.label)},
                {"rule_inputs",
                 {{"coefficient", c.coefficient}, {"p_value", finite_or_null(c.p_value)}, {"alpha", c.alpha}}},
            });
        }
        s["classifications"] = std::move(cls);
        scales[std::to_string(f.imf_index)] = std::move(s);
    }
    j["scales"] = std::move(scales);
    return j;
}

std::string regression_table_csv(std::span<const ScaleFit> fits, const RegressionSpec& spec) {
    std::ostringstream out;
    out << "term";
    for (const auto& f : fits)
        out << ",IMF" << f.imf_index;
    out << '\n';
    char buf[96];
    for (const auto& term : spec.terms()) {
        out << term;
        for (const auto& f : fits) {
            if (!f.result) {
                out << ",NA";
                continue;
            }
            const std::size_t k = f.result->index_of(term);
            std::snprintf(buf, sizeof buf, "%.6g (%.4f)", f.result->coefficients[k], f.result->p_values[k]);
            out << ',' << buf;
        }
        out << '\n';
    }
    out << "R2";
    for (const auto& f : fits) {
        if (!f.result) {
            out << ",NA";
            continue;
        }
        std::snprintf(buf, sizeof buf, "%.4f", f.result->r_squared);
        out << ',' << buf;
    }
    out << '\n';
    return out.str();
}

std::vector<std::filesystem::path> write_regression(const std::filesystem::path& dir, const RegressionReportInfo& info,
                                                    std::span<const ScaleFit> fits) {
    const auto json_path = dir / "regression.json";
    const auto csv_path = dir / "regression.csv";
    const auto cls_path = dir / "classification.csv";
    open_out(json_path) << regression_json(info, fits).dump(2) << '\n';
    open_out(csv_path) << regression_table_csv(fits, info.spec);
    auto cls = open_out(cls_path);
    cls << "imf_index,regressor,label,coefficient,p_value,alpha\n";
    for (const auto& f : fits)
        for (const auto& c : f.classifications)
            cls << c.imf_index << ',' << c.regressor << ',' << to_string(c.label) << ',' << format_number(c.coefficient)
                << ',' << format_number(c.p_value) << ',' << format_number(c.alpha) << '\n';
    return {json_path, csv_path, cls_path};
}

void write_hilbert(const std::filesystem::path& path, const Decomposition& d) {
    std::vector<InstantaneousProfile> profiles;
    for (const auto& imf : d.imfs) {
        std::vector<double> centered = imf.values;
        double mean = 0.0;
        for (double v : centered)
            mean += v;
        mean /= static_cast<double>(centered.size());
        for (double& v : centered)
            v -= mean;
        profiles.push_back(instantaneous_profile(analytic_signal(centered)));
    }
    auto out = open_out(path);
    out << "t,reliable";
    for (const auto& imf : d.imfs)
        out << ",imf" << imf.index << "_amplitude,imf" << imf.index << "_frequency";
    out << '\n';
    for (std::size_t t = 0; t < d.size(); ++t) {
        const bool reliable = profiles.empty() || profiles.front().reliable[t];
        out << t_label(d, t) << ',' << (reliable ? 1 : 0);
        for (const auto& p : profiles)
            out << ',' << format_number(p.amplitude[t]) << ',' << format_number(p.frequency[t]);
        out << '\n';
    }
}

bool write_sift_plot(const std::filesystem::path& path, const Decomposition& d) {
    const std::vector<double> signal = d.reconstruct();
    auto env = envelopes(signal, d.sift.boundary);
    if (!env)
        return false;
    auto imf = extract_imf(signal, d.sift);
    if (!imf)
        return false;
    auto out = open_out(path);
    out << "t,signal,upper,lower,mean,imf1,residual1\n";
    for (std::size_t t = 0; t < signal.size(); ++t) {
        out << t_label(d, t) << ',' << format_number(signal[t]) << ',' << format_number(env->upper[t]) << ','
            << format_number(env->lower[t]) << ',' << format_number(env->mean[t]) << ','
            << format_number(imf->values[t]) << ',' << format_number(signal[t] - imf->values[t]) << '\n';
    }
    return true;
}

void write_component_plot(const std::filesystem::path& path, const Decomposition& d) {
    const std::size_t n = d.size();
    std::vector<double> high(n, 0.0), low = d.residue;
    for (const auto& imf : d.imfs) {
        auto& target = horizon_group(imf.index, d.imfs.size()) == Horizon::short_run ? high : low;
        for (std::size_t t = 0; t < n; ++t)
            target[t] += imf.values[t];
    }
    const std::vector<double> signal = d.reconstruct();
    auto out = open_out(path);
    out << "t,signal,high,low\n";
    for (std::size_t t = 0; t < n; ++t)
        out << t_label(d, t) << ',' << format_number(signal[t]) << ',' << format_number(high[t]) << ','
            << format_number(low[t]) << '\n';
}

} // namespace eemdkit::app
