#pragma once

#include <span>
#include <vector>

namespace eemdkit {

/// Natural cubic spline (zero second derivative at both end knots).
/// With exactly two knots it is the straight line through them.
class NaturalCubicSpline {
public:
    /// `t` must be strictly increasing, same length as `y`, at least 2 knots.
    NaturalCubicSpline(std::vector<double> t, std::vector<double> y);

    double operator()(double x) const;

    /// Evaluates at 0, 1, ..., n-1 in one forward sweep.
    std::vector<double> sample(std::size_t n) const;

    std::span<const double> knots() const noexcept { return t_; }

private:
    double eval_in(std::size_t seg, double x) const;

    std::vector<double> t_;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at the knots
};

} // namespace eemdkit
