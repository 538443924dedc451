#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eemdkit/hilbert.hpp"
#include "support.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace eemdkit;
using std::numbers::pi;

namespace {

std::vector<double> cosine(std::size_t n, double f, double amp = 1.0) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = amp * std::cos(2.0 * pi * f * static_cast<double>(t));
    return x;
}

} // namespace

TEST_CASE("analytic signal of a cosine is the complex exponential") {
    const std::size_t n = 256;
    const auto x = cosine(n, 0.1);
    const auto z = analytic_signal(x);
    REQUIRE(z.size() == n);
    double worst = 0.0;
    for (std::size_t t = 26; t < n - 26; ++t) {
        const auto expected = std::polar(1.0, 2.0 * pi * 0.1 * static_cast<double>(t));
        worst = std::max(worst, std::abs(z[t] - expected));
    }
    CHECK(worst < 0.02);
}

TEST_CASE("analytic signal keeps the input as its real part") {
    const auto x = testing::white_noise(333, 4, 2.0);
    const auto z = analytic_signal(x);
    for (std::size_t t = 0; t < x.size(); ++t)
        CHECK(z[t].real() == doctest::Approx(x[t]).epsilon(1e-10).scale(1.0));
    const auto zero = analytic_signal(std::vector<double>(64, 0.0));
    for (const auto& v : zero)
        CHECK(std::abs(v) == 0.0);
}

TEST_CASE("instantaneous frequency and amplitude of a pure tone") {
    const std::size_t n = 512;
    const auto x = cosine(n, 0.1, 3.0);
    const auto p = instantaneous_profile(analytic_signal(x));
    double mean_f = 0.0;
    std::size_t count = 0;
    for (std::size_t t = n / 10; t < n - n / 10; ++t) {
        CHECK(p.frequency[t] == doctest::Approx(0.1).epsilon(0.02));
        CHECK(p.amplitude[t] == doctest::Approx(3.0).epsilon(0.02));
        mean_f += p.frequency[t];
        ++count;
    }
    CHECK(mean_f / static_cast<double>(count) == doctest::Approx(0.1).epsilon(0.01));
    CHECK_FALSE(p.reliable.front());
    CHECK_FALSE(p.reliable.back());
    CHECK(p.reliable[n / 2]);
}

TEST_CASE("a complex exponential has constant frequency") {
    std::vector<std::complex<double>> z(300);
    for (std::size_t t = 0; t < z.size(); ++t)
        z[t] = std::polar(1.0, 2.0 * pi * 0.1 * static_cast<double>(t));
    const auto p = instantaneous_profile(z);
    for (std::size_t t = 0; t < z.size(); ++t)
        CHECK(p.frequency[t] == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("linear chirp is tracked over the middle 80 percent") {
    const std::size_t n = 1024;
    const double f0 = 0.05, f1 = 0.15;
    const double k = (f1 - f0) / static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double tt = static_cast<double>(t);
        x[t] = std::cos(2.0 * pi * (f0 * tt + 0.5 * k * tt * tt));
    }
    const auto p = instantaneous_profile(analytic_signal(x));
    for (std::size_t t = n / 10; t < n - n / 10; ++t)
        CHECK(p.frequency[t] == doctest::Approx(f0 + k * static_cast<double>(t)).epsilon(0.02));
}

TEST_CASE("scaling changes amplitude only") {
    const auto x = testing::white_noise(200, 8);
    std::vector<double> y(x.size());
    for (std::size_t t = 0; t < x.size(); ++t)
        y[t] = 2.5 * x[t];
    const auto px = instantaneous_profile(analytic_signal(x));
    const auto py = instantaneous_profile(analytic_signal(y));
    for (std::size_t t = 0; t < x.size(); ++t) {
        CHECK(py.amplitude[t] == doctest::Approx(2.5 * px.amplitude[t]).epsilon(1e-10).scale(1.0));
        CHECK(py.frequency[t] == doctest::Approx(px.frequency[t]).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("unwrapped phase never jumps by more than pi") {
    const auto x = testing::white_noise(500, 21);
    const auto phase = unwrapped_phase(analytic_signal(x));
    for (std::size_t t = 1; t < phase.size(); ++t)
        CHECK(std::abs(phase[t] - phase[t - 1]) <= pi + 1e-12);

    std::vector<std::complex<double>> z(50);
    for (std::size_t t = 0; t < z.size(); ++t)
        z[t] = std::polar(1.0, 0.9 * static_cast<double>(t));
    const auto ph = unwrapped_phase(z);
    for (std::size_t t = 0; t < z.size(); ++t)
        CHECK(ph[t] == doctest::Approx(0.9 * static_cast<double>(t)).epsilon(1e-12).scale(1.0));
}
