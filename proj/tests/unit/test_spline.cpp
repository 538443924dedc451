#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eemdkit/error.hpp"
#include "eemdkit/spline.hpp"

#include <Eigen/Dense>

#include <random>

using eemdkit::NaturalCubicSpline;

namespace {

// Dense solve of the natural-spline moment equations, evaluated from the
// textbook piecewise formula. Independent of the Thomas sweep under test.
double oracle(const std::vector<double>& t, const std::vector<double>& y, double x) {
    const int n = static_cast<int>(t.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    A(0, 0) = 1.0;
    A(n - 1, n - 1) = 1.0;
    for (int i = 1; i < n - 1; ++i) {
        const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
        A(i, i - 1) = h0 / 6.0;
        A(i, i) = (h0 + h1) / 3.0;
        A(i, i + 1) = h1 / 6.0;
        b(i) = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    const Eigen::VectorXd m = A.fullPivLu().solve(b);
    int k = 0;
    while (k < n - 2 && x > t[k + 1])
        ++k;
    const double h = t[k + 1] - t[k];
    const double a = (t[k + 1] - x) / h, c = (x - t[k]) / h;
    return a * y[k] + c * y[k + 1] + ((a * a * a - a) * m(k) + (c * c * c - c) * m(k + 1)) * h * h / 6.0;
}

} // namespace

TEST_CASE("two knots give the straight line") {
    NaturalCubicSpline s({2.0, 6.0}, {1.0, 9.0});
    CHECK(s(2.0) == doctest::Approx(1.0));
    CHECK(s(4.0) == doctest::Approx(5.0));
    CHECK(s(6.0) == doctest::Approx(9.0));
    CHECK(s(3.0) == doctest::Approx(3.0));
}

TEST_CASE("knots (0,0),(5,1),(10,0) are interpolated exactly") {
    NaturalCubicSpline s({0.0, 5.0, 10.0}, {0.0, 1.0, 0.0});
    CHECK(s(0.0) == 0.0);
    CHECK(s(5.0) == 1.0);
    CHECK(s(10.0) == 0.0);
    // Symmetric data give a symmetric curve.
    CHECK(s(2.5) == doctest::Approx(s(7.5)).epsilon(1e-14));
}

TEST_CASE("linear data are reproduced exactly") {
    std::vector<double> t{0, 1.5, 4, 7, 7.5, 12}, y;
    for (double v : t)
        y.push_back(3.0 - 0.25 * v);
    NaturalCubicSpline s(t, y);
    for (double x = 0.0; x <= 12.0; x += 0.37)
        CHECK(s(x) == doctest::Approx(3.0 - 0.25 * x).epsilon(1e-12));
}

TEST_CASE("matches a dense moment-equation oracle on random knots") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gap(0.3, 5.0), val(-10.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + trial % 20;
        std::vector<double> t{0.0}, y{val(rng)};
        for (std::size_t i = 1; i < n; ++i) {
            t.push_back(t.back() + gap(rng));
            y.push_back(val(rng));
        }
        NaturalCubicSpline s(t, y);
        for (double x = t.front(); x <= t.back(); x += (t.back() - t.front()) / 97.0)
            CHECK(s(x) == doctest::Approx(oracle(t, y, x)).epsilon(1e-9).scale(10.0));
    }
}

TEST_CASE("sample evaluates at every integer index") {
    std::vector<double> t{0, 3, 5, 9}, y{1, -2, 4, 0};
    NaturalCubicSpline s(t, y);
    const auto v = s.sample(10);
    REQUIRE(v.size() == 10);
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(v[i] == doctest::Approx(s(static_cast<double>(i))).epsilon(1e-14));
}

TEST_CASE("invalid knots are rejected") {
    CHECK_THROWS_AS(NaturalCubicSpline({0.0}, {1.0}), eemdkit::ValidationError);
    CHECK_THROWS_AS(NaturalCubicSpline({0.0, 0.0}, {1.0, 2.0}), eemdkit::ValidationError);
    CHECK_THROWS_AS(NaturalCubicSpline({0.0, 1.0}, {1.0}), eemdkit::ValidationError);
}
