#include "eemdkit/spline.hpp"

#include "eemdkit/error.hpp"

#include <algorithm>

namespace eemdkit {

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> t, std::vector<double> y)
    : t_(std::move(t)), y_(std::move(y)), m_(t_.size(), 0.0) {
    const std::size_t n = t_.size();
    if (n < 2 || y_.size() != n)
        throw ValidationError("emd-engine", "spline needs at least 2 knots with matching values");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(t_[i] > t_[i - 1]))
            throw ValidationError("emd-engine", "spline knots must be strictly increasing");
    }
    if (n == 2)
        return;

    // Tridiagonal system for the interior second derivatives (Thomas algorithm).
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = t_[i] - t_[i - 1];
        const double h1 = t_[i + 1] - t_[i];
        diag[i - 1] = 2.0 * (h0 + h1);
        upper[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < k; ++i) {
        const double lower = t_[i + 1] - t_[i]; // h_{i} is the sub-diagonal of row i
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m_[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;)
        m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
}

double NaturalCubicSpline::eval_in(std::size_t seg, double x) const {
    const double h = t_[seg + 1] - t_[seg];
    const double a = (t_[seg + 1] - x) / h;
    const double b = (x - t_[seg]) / h;
    return a * y_[seg] + b * y_[seg + 1] +
           ((a * a * a - a) * m_[seg] + (b * b * b - b) * m_[seg + 1]) * (h * h) / 6.0;
}

double NaturalCubicSpline::operator()(double x) const {
    auto it = std::upper_bound(t_.begin(), t_.end(), x);
    std::size_t seg = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    seg = std::min(seg, t_.size() - 2);
    return eval_in(seg, x);
}

std::vector<double> NaturalCubicSpline::sample(std::size_t n) const {
    std::vector<double> out(n);
    std::size_t seg = 0;
    const std::size_t last_seg = t_.size() - 2;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        while (seg < last_seg && x >= t_[seg + 1])
            ++seg;
        out[i] = eval_in(seg, x);
    }
    return out;
}

} // namespace eemdkit
