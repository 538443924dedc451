#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eemdkit/app/commands.hpp"
#include "eemdkit/app/config.hpp"
#include "eemdkit/decomposition_io.hpp"
#include "eemdkit/error.hpp"
#include "support.hpp"

#include <json.hpp>

using namespace eemdkit;
using namespace eemdkit::app;

namespace {

const fs::path kData = EEMDKIT_TEST_DATA;

std::string panel_config(const fs::path& out, const std::string& extra = "") {
    return "input.files = " + (kData / "synthetic_panel.csv").string() +
           "\n"
           "regression.dependent = SPI\n"
           "regression.regressors = BP, gold, silver, WTI\n"
           "eemd.ensemble_size = 20\n"
           "output.dir = " +
           out.string() + "\n" + extra;
}

nlohmann::json load_json(const fs::path& p) {
    return nlohmann::json::parse(testing::read_text(p));
}

} // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_run_config("# comment\n"
                                      "input.files = a.csv, b.csv  ; trailing\n"
                                      "seed = 7\n"
                                      "method = emd\n"
                                      "transform = log\n"
                                      "eemd.noise_std = 0.3\n"
                                      "sift.max_imfs = 4\n"
                                      "regression.dependent = SPI\n"
                                      "regression.regressors = BP\n"
                                      "regression.robust_se = true\n"
                                      "forward.columns = WTI\n"
                                      "forward.rate = r\n"
                                      "forward.storage = 1.5\n",
                                      "/base");
    CHECK(cfg.input_files == std::vector<fs::path>{"/base/a.csv", "/base/b.csv"});
    CHECK(cfg.eemd.seed == 7);
    CHECK_FALSE(cfg.seed_defaulted);
    CHECK(cfg.method == Method::emd);
    CHECK(cfg.transform == Transform::log);
    CHECK(cfg.eemd.noise_std == 0.3);
    CHECK(cfg.eemd.sift.max_imfs == 4u);
    REQUIRE(cfg.regression);
    CHECK(cfg.regression->covariance == CovarianceEstimator::hc1);
    REQUIRE(cfg.forward);
    CHECK(cfg.forward->rate.column == "r");
    CHECK(cfg.forward->storage.constant == 1.5);
    CHECK(cfg.forward->convenience.constant == 0.0);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_run_config("input.files = a.csv\nbogus.key = 1\n", "."), ValidationError);
    CHECK_THROWS_AS(parse_run_config("seed = 1\n", "."), ValidationError);
    CHECK_THROWS_AS(parse_run_config("input.files = a.csv\nseed = -1\n", "."), ValidationError);
    CHECK_THROWS_AS(parse_run_config("input.files = a.csv\nno equals sign\n", "."), ValidationError);
    CHECK_THROWS_AS(parse_run_config("input.files = a.csv\nseed = 1\nseed = 2\n", "."), ValidationError);
    CHECK_THROWS_AS(parse_run_config("input.files = a.csv\nregression.dependent = SPI\n", "."), ValidationError);
    CHECK_THROWS_AS(parse_run_config("input.files = a.csv\ndeflate.columns = gold\n", "."), ValidationError);
    const auto cfg = parse_run_config("input.files = a.csv\n", ".");
    CHECK(cfg.seed_defaulted);
    CHECK(cfg.eemd.seed == kDefaultSeed);
}

TEST_CASE("sha256 of a known string") {
    testing::TempDir dir("app");
    testing::write_text(dir / "abc.txt", "abc");
    CHECK(sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("pipeline writes a self-verifying run directory") {
    testing::TempDir dir("app");
    const auto cfg = parse_run_config(panel_config(dir / "run", "emit.hilbert = true\nemit.plotdata = true\n"), ".");
    const auto manifest_path = run_pipeline(cfg);
    const auto m = load_json(manifest_path);
    CHECK(m["status"] == "ok");
    CHECK(m["seed"] == 42);
    CHECK(m["seed_source"] == "default");
    CHECK(m["config"]["seed"] == "42");
    const auto stages = m["stages_completed"].get<std::vector<std::string>>();
    CHECK(stages == std::vector<std::string>{"ingest", "align", "decompose", "features", "regress", "hilbert", "plotdata"});
    for (const auto& [name, entry] : m["files"].items())
        CHECK(sha256_file(dir / "run" / name) == entry["sha256"].get<std::string>());
    CHECK(m["files"].contains("regression/regression.csv"));
    CHECK(m["files"].contains("features/BP_features.json"));
    CHECK(m["files"].contains("prepared_panel.csv"));
    CHECK(testing::read_text(manifest_path).find(dir.path().string()) == std::string::npos);

    // A rerun is byte-identical.
    const auto first = testing::read_text(manifest_path);
    run_pipeline(cfg);
    CHECK(testing::read_text(manifest_path) == first);
}

TEST_CASE("a failing stage is recorded in the manifest") {
    testing::TempDir dir("app");
    auto cfg = parse_run_config(panel_config(dir / "run", "input.columns = BP, SPI, gold, silver, WTI\n"), ".");
    cfg.regression->regressors = {"BP", "nosuch"};
    cfg.columns.push_back("nosuch");
    CHECK_THROWS_AS(run_pipeline(cfg), ValidationError);
    const auto m = load_json(dir / "run" / "manifest.json");
    CHECK(m["status"] == "failed");
    CHECK(m["error"]["kind"] == "validation");
    CHECK(m["stages_completed"].empty());
}

TEST_CASE("pipeline refuses to write over its inputs") {
    testing::TempDir dir("app");
    testing::write_text(dir / "panel.csv", testing::read_text(kData / "synthetic_panel.csv"));
    auto cfg = parse_run_config("input.files = panel.csv\n", dir.path());
    PipelineOverrides o;
    o.out = dir.path();
    CHECK_THROWS_AS(run_pipeline(cfg, o), ValidationError);
    CHECK(testing::read_text(dir / "panel.csv") == testing::read_text(kData / "synthetic_panel.csv"));
}

TEST_CASE("deflation, forward prices and log levels run end to end") {
    testing::TempDir dir("app");
    const auto cfg = parse_run_config(panel_config(dir / "run",
                                                   "transform = log\n"
                                                   "deflate.columns = gold\n"
                                                   "deflate.index_file = " +
                                                       (kData / "cpi_monthly.csv").string() +
                                                       "\n"
                                                       "deflate.index_column = CPI\n"
                                                       "forward.columns = WTI\n"
                                                       "forward.rate = 0.001\n"),
                                      ".");
    const auto m = load_json(run_pipeline(cfg));
    const auto stages = m["stages_completed"].get<std::vector<std::string>>();
    CHECK(stages == std::vector<std::string>{"ingest", "align", "deflate", "forward", "transform", "decompose",
                                             "features", "regress"});
    const auto prepared = ingest_csv(dir / "run" / "prepared_panel.csv", "WTI");
    const auto raw = ingest_csv(kData / "synthetic_panel.csv", "WTI");
    CHECK(prepared.values[0] == doctest::Approx(std::log(raw.values[0] * 1.001)));
}

TEST_CASE("decompose, features, regress, hilbert and plotdata commands") {
    testing::TempDir dir("app");
    DecomposeArgs d;
    d.input = kData / "synthetic_panel.csv";
    d.eemd.ensemble_size = 10;
    d.out = dir / "dec";
    const auto stems = run_decompose(d);
    CHECK(stems.size() == 5);

    const auto feats = run_features({dir / "dec", {"BP"}, HorizonRule::by_index, dir / "feat"});
    REQUIRE(feats.size() == 2);
    const auto fj = load_json(dir / "feat" / "BP_features.json");
    double total = 0.0;
    for (const auto& row : fj["rows"])
        total += row["variance_share"].get<double>();
    CHECK(total == doctest::Approx(100.0).epsilon(1e-4));

    RegressArgs r;
    r.spec.dependent = "SPI";
    r.spec.regressors = {"BP", "gold", "silver", "WTI"};
    r.from = dir / "dec";
    r.out = dir / "reg";
    run_regress(r);
    const auto classical = load_json(dir / "reg" / "regression.json");
    r.spec.covariance = CovarianceEstimator::hc1;
    r.out = dir / "reg_hc1";
    run_regress(r);
    const auto robust = load_json(dir / "reg_hc1" / "regression.json");
    const auto& t0 = classical["scales"]["1"]["terms"];
    const auto& t1 = robust["scales"]["1"]["terms"];
    bool se_differs = false;
    for (std::size_t k = 0; k < t0.size(); ++k) {
        CHECK(t0[k]["coefficient"] == t1[k]["coefficient"]);
        se_differs = se_differs || t0[k]["std_error"] != t1[k]["std_error"];
    }
    CHECK(se_differs);

    r.transform = Transform::log;
    CHECK_THROWS_AS(run_regress(r), ValidationError);

    CHECK(run_hilbert({dir / "dec", {"BP"}, dir / "hil"}).size() == 1);
    CHECK(run_plotdata({dir / "dec", {"BP"}, dir / "plot"}).size() == 2);
    CHECK_THROWS_AS(run_features({dir / "nowhere", {}, HorizonRule::by_index, {}}), ValidationError);
}

TEST_CASE("constant input gives an empty feature table with a note") {
    testing::TempDir dir("app");
    std::string csv = "date,flat\n";
    for (int i = 0; i < 20; ++i)
        csv += "2017-01-" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1) + ",5\n";
    testing::write_text(dir / "flat.csv", csv);
    DecomposeArgs d;
    d.input = dir / "flat.csv";
    d.method = Method::emd;
    d.out = dir / "dec";
    run_decompose(d);
    run_features({dir / "dec", {}, HorizonRule::by_index, {}});
    const auto j = load_json(dir / "dec" / "flat_features.json");
    CHECK(j["rows"].empty());
    CHECK(j.contains("note"));
}
