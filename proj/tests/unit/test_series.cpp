#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eemdkit/error.hpp"
#include "eemdkit/series.hpp"
#include "support.hpp"

#include <chrono>

using namespace eemdkit;
using namespace std::chrono;

namespace {

Date ymd(int y, unsigned m, unsigned d) {
    return sys_days{year{y} / month{m} / d};
}

TimeSeries daily(const std::string& name, Date start, std::vector<double> values) {
    TimeSeries s;
    s.name = name;
    for (std::size_t i = 0; i < values.size(); ++i)
        s.dates.push_back(start + days{static_cast<int>(i)});
    s.values = std::move(values);
    return s;
}

} // namespace

TEST_CASE("iso dates parse strictly and round-trip") {
    CHECK(parse_iso_date("2016-11-08") == ymd(2016, 11, 8));
    CHECK(format_iso_date(ymd(2017, 2, 15)) == "2017-02-15");
    CHECK_THROWS_AS(parse_iso_date("2016-02-30"), ValidationError);
    CHECK_THROWS_AS(parse_iso_date("2016-1-08"), ValidationError);
    CHECK_THROWS_AS(parse_iso_date("08/11/2016"), ValidationError);
}

TEST_CASE("three-row file reads back as a length-3 series") {
    testing::TempDir dir("series");
    testing::write_text(dir / "p.csv", "date,BP\n2016-11-08,710.5\n2016-11-09,712.1\n2016-11-10,708.9\n");
    const auto s = ingest_csv(dir / "p.csv", "BP");
    REQUIRE(s.size() == 3);
    CHECK(s.name == "BP");
    CHECK(s.values == std::vector<double>{710.5, 712.1, 708.9});
    CHECK(s.dates.front() == ymd(2016, 11, 8));
    CHECK(s.dates.back() == ymd(2016, 11, 10));
}

TEST_CASE("a non-numeric cell is reported with its row") {
    testing::TempDir dir("series");
    testing::write_text(dir / "p.csv", "date,BP\n2016-11-08,1\n2016-11-09,2\n2016-11-10,3\n2016-11-11,4\n"
                                       "2016-11-12,abc\n2016-11-13,6\n");
    try {
        ingest_csv(dir / "p.csv", "BP");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 5") != std::string::npos);
        CHECK(msg.find("BP") != std::string::npos);
    }
}

TEST_CASE("ingestion rejects missing columns, unsorted dates and non-finite values") {
    testing::TempDir dir("series");
    testing::write_text(dir / "a.csv", "date,BP\n2016-11-08,1\n2016-11-09,2\n");
    CHECK_THROWS_AS(ingest_csv(dir / "a.csv", "SPI"), ValidationError);
    testing::write_text(dir / "b.csv", "date,BP\n2016-11-09,1\n2016-11-08,2\n");
    CHECK_THROWS_AS(ingest_csv(dir / "b.csv", "BP"), ValidationError);
    testing::write_text(dir / "c.csv", "date,BP\n2016-11-08,1\n2016-11-09,nan\n");
    CHECK_THROWS_AS(ingest_csv(dir / "c.csv", "BP"), ValidationError);
    CHECK_THROWS_AS(ingest_csv(dir / "missing.csv", "BP"), ValidationError);
}

TEST_CASE("the bundled 99-row panel spans the sample window") {
    const auto s = ingest_csv(std::filesystem::path(EEMDKIT_TEST_DATA) / "synthetic_panel.csv", "BP");
    CHECK(s.size() == 99);
    CHECK(s.dates.front() == ymd(2016, 11, 8));
    CHECK(s.dates.back() == ymd(2017, 2, 15));
    const auto cols = csv_value_columns(std::filesystem::path(EEMDKIT_TEST_DATA) / "synthetic_panel.csv");
    CHECK(cols == std::vector<std::string>{"BP", "SPI", "gold", "silver", "WTI"});
}

TEST_CASE("write_csv then ingest reproduces values and dates bit for bit") {
    testing::TempDir dir("series");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    std::vector<double> a(40), b(40);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = u(rng) / 3.0;
        b[i] = std::ldexp(u(rng), -40);
    }
    std::vector<TimeSeries> in{daily("a", ymd(2016, 11, 8), a), daily("b", ymd(2016, 11, 8), b)};
    write_csv(dir / "rt.csv", in);
    const auto back = ingest_csv_columns(dir / "rt.csv", std::vector<std::string>{"a", "b"});
    REQUIRE(back.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(back[k].dates == in[k].dates);
        CHECK(back[k].values == in[k].values);
    }
}

TEST_CASE("align intersects calendars") {
    SUBCASE("identical calendars are untouched") {
        std::vector<TimeSeries> s{daily("x", ymd(2017, 1, 1), {1, 2, 3, 4, 5}),
                                  daily("y", ymd(2017, 1, 1), {5, 4, 3, 2, 1})};
        const auto p = align(s);
        CHECK(p.dates == s[0].dates);
        CHECK(p.at("x").values == s[0].values);
        CHECK(p.at("y").values == s[1].values);
    }
    SUBCASE("{d1..d5} and {d3..d7} give {d3,d4,d5}") {
        std::vector<TimeSeries> s{daily("x", ymd(2017, 1, 1), {1, 2, 3, 4, 5}),
                                  daily("y", ymd(2017, 1, 3), {30, 40, 50, 60, 70})};
        const auto p = align(s);
        CHECK(p.dates == std::vector<Date>{ymd(2017, 1, 3), ymd(2017, 1, 4), ymd(2017, 1, 5)});
        CHECK(p.at("x").values == std::vector<double>{3, 4, 5});
        CHECK(p.at("y").values == std::vector<double>{30, 40, 50});
    }
    SUBCASE("a date missing from one series is dropped from all") {
        auto a = daily("a", ymd(2017, 1, 1), {1, 2, 3, 4, 5, 6});
        auto b = daily("b", ymd(2017, 1, 1), {1, 2, 3, 4, 5, 6});
        auto c = daily("c", ymd(2017, 1, 1), {1, 2, 3, 4, 5, 6});
        b.dates.erase(b.dates.begin() + 2);
        b.values.erase(b.values.begin() + 2);
        std::vector<TimeSeries> s{a, b, c};
        const auto p = align(s);
        CHECK(p.dates.size() == 5);
        for (const auto& ser : p.series)
            CHECK(std::find(ser.dates.begin(), ser.dates.end(), ymd(2017, 1, 3)) == ser.dates.end());
        CHECK(p.at("a").values == std::vector<double>{1, 2, 4, 5, 6});
    }
    SUBCASE("align is idempotent") {
        auto a = daily("a", ymd(2017, 1, 1), {1, 2, 3, 4, 5, 6, 7, 8});
        auto b = daily("b", ymd(2017, 1, 3), {1, 2, 3, 4, 5, 6, 7, 8});
        std::vector<TimeSeries> s{a, b};
        const auto once = align(s);
        const auto twice = align(once.series);
        CHECK(twice.dates == once.dates);
        for (std::size_t k = 0; k < 2; ++k)
            CHECK(twice.series[k].values == once.series[k].values);
    }
    SUBCASE("disjoint calendars fail") {
        std::vector<TimeSeries> s{daily("x", ymd(2017, 1, 1), {1, 2, 3, 4}),
                                  daily("y", ymd(2018, 1, 1), {1, 2, 3, 4})};
        CHECK_THROWS_AS(align(s), ValidationError);
    }
}

TEST_CASE("low-frequency series interpolate linearly onto a daily calendar") {
    TimeSeries low;
    low.name = "cpi";
    low.dates = {ymd(2017, 1, 1), ymd(2017, 1, 31)};
    low.values = {100.0, 130.0};
    std::vector<Date> target;
    for (int i = 0; i <= 30; ++i)
        target.push_back(ymd(2017, 1, 1) + days{i});
    const auto up = upsample_low_to_high(low, target);
    CHECK(up.values[15] == doctest::Approx(115.0).epsilon(1e-15));
    CHECK(up.values[0] == 100.0);
    CHECK(up.values[30] == 130.0);
    for (std::size_t i = 1; i < up.size(); ++i)
        CHECK(up.values[i] >= up.values[i - 1]);

    TimeSeries flat = low;
    flat.values = {2.0, 2.0};
    for (double v : upsample_low_to_high(flat, target).values)
        CHECK(v == 2.0);

    std::vector<Date> outside{ymd(2016, 12, 31)};
    CHECK_THROWS_AS(upsample_low_to_high(low, outside), ValidationError);
}

TEST_CASE("deflation divides by the normalized index") {
    auto nominal = daily("gold", ymd(2017, 1, 1), {200.0, 200.0, 150.0});
    auto index = daily("cpi", ymd(2017, 1, 1), {120.0, 240.0, 120.0});
    const auto real = deflate_to_real(nominal, index);
    CHECK(real.values[0] == 200.0);
    CHECK(real.values[1] == doctest::Approx(100.0));
    CHECK(real.values[2] == doctest::Approx(150.0));

    auto constant = daily("cpi", ymd(2017, 1, 1), {7.0, 7.0, 7.0});
    CHECK(deflate_to_real(nominal, constant).values == nominal.values);
    auto ones = daily("cpi", ymd(2017, 1, 1), {1.0, 1.0, 1.0});
    CHECK(deflate_to_real(nominal, ones).values == nominal.values);
}

TEST_CASE("forward price adds carry and subtracts convenience yield") {
    CHECK(forward_price({100.0, 0.0, 0.0, 0.0}) == 100.0);
    CHECK(forward_price({100.0, 0.02, 0.0, 0.0}) == doctest::Approx(102.0).epsilon(1e-15));
    CHECK(forward_price({100.0, 0.02, 1.5, 0.5}) == doctest::Approx(103.0).epsilon(1e-15));

    // Linear in S with slope 1 + r.
    const double f1 = forward_price({50.0, 0.03, 2.0, 1.0});
    const double f2 = forward_price({150.0, 0.03, 2.0, 1.0});
    CHECK((f2 - f1) / 100.0 == doctest::Approx(1.03).epsilon(1e-14));
    CHECK(f1 - 50.0 == doctest::Approx(0.03 * 50.0 + 2.0 - 1.0).epsilon(1e-14));
    CHECK_THROWS_AS(forward_price({std::nan(""), 0.0, 0.0, 0.0}), ValidationError);
}

TEST_CASE("log transform requires positive values") {
    auto s = daily("x", ymd(2017, 1, 1), {1.0, std::exp(1.0), std::exp(2.0)});
    const auto l = log_transform(s);
    CHECK(l.values[0] == 0.0);
    CHECK(l.values[1] == doctest::Approx(1.0));
    CHECK(l.values[2] == doctest::Approx(2.0));
    auto bad = daily("x", ymd(2017, 1, 1), {1.0, 0.0});
    CHECK_THROWS_AS(log_transform(bad), ValidationError);
}
