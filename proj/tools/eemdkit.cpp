// eemdkit command-line driver.

#include "eemdkit/app/commands.hpp"
#include "eemdkit/error.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

namespace app = eemdkit::app;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct DecompositionFlags {
    std::string method = "eemd";
    double noise_std = 0.2;
    std::size_t ensemble = 100;
    unsigned threads = 0;
    double sd_threshold = 0.2;
    std::size_t max_sift_iters = 100;
    std::string max_imfs = "auto";
    std::string boundary = "mirror";

    void attach(CLI::App* cmd) {
        cmd->add_option("--method", method, "emd or eemd")->check(CLI::IsMember({"emd", "eemd"}));
        cmd->add_option("--noise-std", noise_std, "EEMD noise amplitude in units of the series std");
        cmd->add_option("--ensemble", ensemble, "EEMD ensemble size");
        cmd->add_option("--threads", threads, "worker threads for EEMD trials (0 = all cores)");
        cmd->add_option("--sd-threshold", sd_threshold, "sifting stop threshold");
        cmd->add_option("--max-sift-iters", max_sift_iters, "sifting iteration cap per IMF");
        cmd->add_option("--max-imfs", max_imfs, "IMF cap, or 'auto' for floor(log2 N) - 1");
        cmd->add_option("--boundary", boundary, "envelope end treatment")->check(CLI::IsMember({"mirror", "clamp"}));
    }

    eemdkit::EemdConfig config(std::uint64_t seed) const {
        eemdkit::EemdConfig c;
        c.noise_std = noise_std;
        c.ensemble_size = ensemble;
        c.seed = seed;
        c.threads = threads;
        c.sift.sd_threshold = sd_threshold;
        c.sift.max_sift_iters = max_sift_iters;
        c.sift.boundary = eemdkit::parse_boundary_policy(boundary);
        if (max_imfs != "auto") {
            try {
                c.sift.max_imfs = std::stoul(max_imfs);
            } catch (const std::exception&) {
                throw eemdkit::ValidationError("cli-harness", "--max-imfs must be a positive integer or 'auto'");
            }
        }
        c.validate();
        return c;
    }

    eemdkit::Method parsed_method() const {
        return method == "emd" ? eemdkit::Method::emd : eemdkit::Method::eemd;
    }
};

std::vector<std::string> flatten_lists(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& r : raw)
        for (auto& item : app::split_list(r))
            out.push_back(std::move(item));
    return out;
}

void report(const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files)
        std::cout << f.string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Empirical mode decomposition and multiscale hedge/safe-haven analysis"};
    cli.require_subcommand(1);
    cli.fallthrough();
    cli.set_version_flag("--version", app::version_string());

    std::string out;
    std::optional<std::uint64_t> seed;
    std::string log_level = "warn";
    cli.add_option("--out", out, "output directory");
    cli.add_option("--seed", seed, "EEMD noise seed (default 42)");
    cli.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

    // decompose
    auto* dec = cli.add_subcommand("decompose", "decompose CSV columns into IMFs");
    std::filesystem::path dec_input;
    std::vector<std::string> dec_columns;
    std::string dec_transform = "levels";
    DecompositionFlags dec_flags;
    dec->add_option("--input", dec_input, "CSV with a date column")->required();
    dec->add_option("--column", dec_columns, "column(s) to decompose; default all");
    dec->add_option("--transform", dec_transform, "levels or log")->check(CLI::IsMember({"levels", "log"}));
    dec_flags.attach(dec);

    // features
    auto* feat = cli.add_subcommand("features", "IMF feature table from stored decompositions");
    std::filesystem::path feat_from;
    std::vector<std::string> feat_columns;
    std::string feat_horizon = "index";
    feat->add_option("--from", feat_from, "directory with decomposition files")->required();
    feat->add_option("--column", feat_columns, "series name(s); default every decomposition found");
    feat->add_option("--horizon", feat_horizon, "index or period")->check(CLI::IsMember({"index", "period"}));

    // regress
    auto* reg = cli.add_subcommand("regress", "per-scale lagged regression with safe-haven labels");
    std::optional<std::filesystem::path> reg_from, reg_input;
    std::string reg_dependent;
    std::vector<std::string> reg_regressors;
    std::size_t reg_lag = 1;
    double reg_alpha = 0.10;
    bool reg_robust = false;
    std::string reg_taxonomy = "sign-significance";
    std::optional<std::string> reg_transform;
    DecompositionFlags reg_flags;
    auto* from_opt = reg->add_option("--from", reg_from, "directory with stored decompositions");
    auto* input_opt = reg->add_option("--input", reg_input, "panel CSV to decompose first");
    from_opt->excludes(input_opt);
    reg->add_option("--dependent", reg_dependent, "dependent series")->required();
    reg->add_option("--regressors", reg_regressors, "regressor series (comma separated)")->required();
    reg->add_option("--lag-dependent", reg_lag, "lags of the dependent variable");
    reg->add_option("--alpha", reg_alpha, "significance level for the labels");
    reg->add_flag("--robust-se", reg_robust, "heteroskedasticity-robust (HC1) standard errors");
    reg->add_option("--taxonomy", reg_taxonomy, "labelling rule")
        ->check(CLI::IsMember({"sign-significance", "significance-only"}));
    reg->add_option("--transform", reg_transform, "levels or log (with --input)")
        ->check(CLI::IsMember({"levels", "log"}));
    reg_flags.attach(reg);

    // hilbert / plotdata
    std::filesystem::path hil_from, plot_from;
    std::vector<std::string> hil_columns, plot_columns;
    auto* hil = cli.add_subcommand("hilbert", "instantaneous amplitude and frequency of every IMF");
    hil->add_option("--from", hil_from, "directory with decomposition files")->required();
    hil->add_option("--column", hil_columns, "series name(s)");
    auto* plot = cli.add_subcommand("plotdata", "plot-ready CSVs (sifting illustration, component split)");
    plot->add_option("--from", plot_from, "directory with decomposition files")->required();
    plot->add_option("--column", plot_columns, "series name(s)");

    // pipeline
    auto* pipe = cli.add_subcommand("pipeline", "full run from a config file");
    std::filesystem::path pipe_config;
    std::optional<unsigned> pipe_threads;
    pipe->add_option("config", pipe_config, "key = value run configuration")->required()->check(CLI::ExistingFile);
    pipe->add_option("--threads", pipe_threads, "worker threads for EEMD trials");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    auto logger = spdlog::stderr_color_mt("eemdkit");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(log_level));
    spdlog::set_pattern("[%l] %v");

    const std::uint64_t seed_value = seed.value_or(app::kDefaultSeed);
    const std::filesystem::path out_dir = out;

    try {
        if (*dec) {
            app::DecomposeArgs a;
            a.input = dec_input;
            a.columns = flatten_lists(dec_columns);
            a.method = dec_flags.parsed_method();
            a.eemd = dec_flags.config(seed_value);
            a.transform = app::parse_transform(dec_transform);
            a.out = out.empty() ? "." : out_dir;
            report(app::run_decompose(a));
        } else if (*feat) {
            app::FeaturesArgs a;
            a.from = feat_from;
            a.columns = flatten_lists(feat_columns);
            a.horizon = eemdkit::parse_horizon_rule(feat_horizon);
            a.out = out_dir;
            report(app::run_features(a));
        } else if (*reg) {
            app::RegressArgs a;
            a.spec.dependent = reg_dependent;
            a.spec.regressors = flatten_lists(reg_regressors);
            a.spec.lag_dependent = reg_lag;
            a.spec.alpha = reg_alpha;
            a.spec.covariance = reg_robust ? eemdkit::CovarianceEstimator::hc1 : eemdkit::CovarianceEstimator::classical;
            a.taxonomy = eemdkit::parse_taxonomy(reg_taxonomy);
            a.from = reg_from;
            a.input = reg_input;
            if (reg_transform)
                a.transform = app::parse_transform(*reg_transform);
            a.method = reg_flags.parsed_method();
            a.eemd = reg_flags.config(seed_value);
            a.out = out.empty() ? "." : out_dir;
            report(app::run_regress(a));
        } else if (*hil) {
            report(app::run_hilbert({hil_from, flatten_lists(hil_columns), out_dir}));
        } else if (*plot) {
            report(app::run_plotdata({plot_from, flatten_lists(plot_columns), out_dir}));
        } else if (*pipe) {
            app::PipelineOverrides o;
            if (!out.empty())
                o.out = out_dir;
            o.seed = seed;
            o.threads = pipe_threads;
            std::cout << app::run_pipeline(pipe_config, o).lexically_normal().string() << '\n';
        }
    } catch (const eemdkit::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == eemdkit::ErrorKind::validation ? kExitValidation : kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
