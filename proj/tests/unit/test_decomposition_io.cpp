#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eemdkit/decomposition_io.hpp"
#include "eemdkit/eemd.hpp"
#include "eemdkit/error.hpp"
#include "support.hpp"

using namespace eemdkit;

TEST_CASE("decompositions round-trip through CSV and sidecar") {
    testing::TempDir dir("io");
    TimeSeries s;
    s.name = "BP";
    const auto x = testing::white_noise(120, 6);
    for (std::size_t t = 0; t < x.size(); ++t)
        s.dates.push_back(parse_iso_date("2016-11-08") + std::chrono::days{static_cast<int>(t)});
    s.values = x;
    EemdConfig cfg;
    cfg.ensemble_size = 10;
    const auto d = eemd(s, cfg);
    write_decomposition(dir / "BP", d, {{"transform", "levels"}});

    const auto back = read_decomposition(dir / "BP");
    REQUIRE(back.imfs.size() == d.imfs.size());
    for (std::size_t j = 0; j < d.imfs.size(); ++j)
        CHECK(back.imfs[j].values == d.imfs[j].values);
    CHECK(back.residue == d.residue);
    CHECK(back.dates == d.dates);
    CHECK(back.source == "BP");
    CHECK(back.method == Method::eemd);
    REQUIRE(back.eemd);
    CHECK(back.eemd->seed == 42);
    CHECK(back.trial_coverage == d.trial_coverage);

    const auto side = read_sidecar(dir / "BP");
    CHECK(side["format"] == "eemdkit.decomposition/1");
    CHECK(side["transform"] == "levels");
    CHECK(side["sift"]["max_imfs"] == "auto");
    CHECK(side["sift"]["max_imfs_resolved"] == 5);
}

TEST_CASE("missing or malformed files are validation errors") {
    testing::TempDir dir("io");
    CHECK_THROWS_AS(read_decomposition(dir / "nothing"), ValidationError);
    testing::write_text(dir / "bad.csv", "t,imf1,residue\n0,1,x\n");
    CHECK_THROWS_AS(read_decomposition(dir / "bad"), ValidationError);
    testing::write_text(dir / "hdr.csv", "t,foo,residue\n0,1,2\n");
    CHECK_THROWS_AS(read_decomposition(dir / "hdr"), ValidationError);
}

TEST_CASE("sidecar is optional") {
    testing::TempDir dir("io");
    testing::write_text(dir / "plain.csv", "t,imf1,imf2,residue\n0,1,2,3\n1,-1,2,3\n2,1,-2,3\n");
    const auto d = read_decomposition(dir / "plain");
    CHECK(d.imfs.size() == 2);
    CHECK(d.dates.empty());
    CHECK(d.reconstruct() == std::vector<double>{6, 4, 2});
}
