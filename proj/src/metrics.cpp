#include "eemdkit/metrics.hpp"

#include "eemdkit/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>

namespace eemdkit {

namespace {

constexpr const char* kModule = "scale-metrics";

void check_pair(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ValidationError(kModule, "correlation inputs differ in length (" + std::to_string(a.size()) + " vs " +
                                           std::to_string(b.size()) + ")");
    if (a.size() < 3)
        throw ValidationError(kModule, "correlation needs at least 3 samples");
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_variance(std::span<const double> v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size());
}

struct TieStats {
    std::int64_t pairs = 0; // sum t(t-1)/2
    double v1 = 0.0;        // sum t(t-1)(t-2)
    double v2 = 0.0;        // sum t(t-1)(2t+5)
};

void add_tie_group(TieStats& s, std::int64_t t) {
    if (t < 2)
        return;
    const double td = static_cast<double>(t);
    s.pairs += t * (t - 1) / 2;
    s.v1 += td * (td - 1.0) * (td - 2.0);
    s.v2 += td * (td - 1.0) * (2.0 * td + 5.0);
}

TieStats tie_stats(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    TieStats s;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i + 1;
        while (j < v.size() && v[j] == v[i])
            ++j;
        add_tie_group(s, static_cast<std::int64_t>(j - i));
        i = j;
    }
    return s;
}

// Sorts v[lo, hi) and returns the number of strict inversions.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& tmp, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2)
        return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = merge_count(v, tmp, lo, mid) + merge_count(v, tmp, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += static_cast<std::int64_t>(mid - i);
            tmp[k++] = v[j++];
        } else {
            tmp[k++] = v[i++];
        }
    }
    while (i < mid)
        tmp[k++] = v[i++];
    while (j < hi)
        tmp[k++] = v[j++];
    std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo), tmp.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

struct KendallCounts {
    std::int64_t concordant_minus_discordant = 0;
    std::int64_t total = 0;
    TieStats a_ties, b_ties;
};

KendallCounts kendall_counts(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a[i] < a[j] || (a[i] == a[j] && b[i] < b[j]);
    });

    KendallCounts k;
    k.total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;

    // Pairs tied on a, and pairs tied on both.
    std::int64_t joint_ties = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && a[order[j]] == a[order[i]])
            ++j;
        add_tie_group(k.a_ties, static_cast<std::int64_t>(j - i));
        std::size_t p = i;
        while (p < j) {
            std::size_t q = p + 1;
            while (q < j && b[order[q]] == b[order[p]])
                ++q;
            const auto t = static_cast<std::int64_t>(q - p);
            joint_ties += t * (t - 1) / 2;
            p = q;
        }
        i = j;
    }

    std::vector<double> bs(n), tmp(n);
    for (std::size_t r = 0; r < n; ++r)
        bs[r] = b[order[r]];
    const std::int64_t discordant = merge_count(bs, tmp, 0, n);
    k.b_ties = tie_stats(std::vector<double>(b.begin(), b.end()));

    k.concordant_minus_discordant = k.total - k.a_ties.pairs - k.b_ties.pairs + joint_ties - 2 * discordant;
    return k;
}

double two_sided_t(double t, double dof) {
    if (std::isinf(t))
        return 0.0;
    boost::math::students_t dist(dof);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

} // namespace

std::optional<double> mean_period(std::span<const double> imf) {
    const std::size_t peaks = find_extrema(imf).maxima.size();
    if (peaks == 0)
        return std::nullopt;
    return static_cast<double>(imf.size()) / static_cast<double>(peaks);
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    check_pair(a, b);
    const double ma = mean_of(a), mb = mean_of(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        return std::nullopt;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::optional<double> kendall_tau(std::span<const double> a, std::span<const double> b) {
    check_pair(a, b);
    const KendallCounts k = kendall_counts(a, b);
    const std::int64_t da = k.total - k.a_ties.pairs;
    const std::int64_t db = k.total - k.b_ties.pairs;
    if (da == 0 || db == 0)
        return std::nullopt;
    const double tau = static_cast<double>(k.concordant_minus_discordant) /
                       std::sqrt(static_cast<double>(da) * static_cast<double>(db));
    return std::clamp(tau, -1.0, 1.0);
}

std::optional<CorrelationTest> pearson_test(std::span<const double> a, std::span<const double> b) {
    auto r = pearson(a, b);
    if (!r)
        return std::nullopt;
    const double dof = static_cast<double>(a.size()) - 2.0;
    CorrelationTest out{*r, 1.0};
    if (dof <= 0.0)
        return out;
    const double denom = 1.0 - (*r) * (*r);
    if (denom <= 0.0) {
        out.p_value = 0.0;
        return out;
    }
    out.p_value = two_sided_t(*r * std::sqrt(dof / denom), dof);
    return out;
}

std::optional<CorrelationTest> kendall_test(std::span<const double> a, std::span<const double> b) {
    check_pair(a, b);
    const KendallCounts k = kendall_counts(a, b);
    const std::int64_t da = k.total - k.a_ties.pairs;
    const std::int64_t db = k.total - k.b_ties.pairs;
    if (da == 0 || db == 0)
        return std::nullopt;
    CorrelationTest out;
    out.estimate = std::clamp(static_cast<double>(k.concordant_minus_discordant) /
                                  std::sqrt(static_cast<double>(da) * static_cast<double>(db)),
                              -1.0, 1.0);
    const double n = static_cast<double>(a.size());
    const double m = n * (n - 1.0);
    const double var = (m * (2.0 * n + 5.0) - k.a_ties.v2 - k.b_ties.v2) / 18.0 +
                       2.0 * static_cast<double>(k.a_ties.pairs) * static_cast<double>(k.b_ties.pairs) / m +
                       k.a_ties.v1 * k.b_ties.v1 / (9.0 * m * (n - 2.0));
    if (var <= 0.0) {
        out.p_value = 1.0;
        return out;
    }
    const double z = static_cast<double>(k.concordant_minus_discordant) / std::sqrt(var);
    out.p_value = std::min(1.0, std::erfc(std::abs(z) / std::numbers::sqrt2));
    return out;
}

std::vector<double> variance_share(const Decomposition& d) {
    if (d.imfs.empty())
        throw ValidationError(kModule, "variance share needs at least one IMF");
    std::vector<double> var;
    double total = 0.0;
    for (const auto& imf : d.imfs) {
        var.push_back(population_variance(imf.values));
        total += var.back();
    }
    if (!(total > 0.0))
        throw NumericalError(kModule, "variance share undefined: every IMF has zero variance");
    for (auto& v : var)
        v = v / total * 100.0;
    return var;
}

std::string to_string(Horizon h) {
    switch (h) {
    case Horizon::short_run:
        return "short";
    case Horizon::medium_run:
        return "medium";
    case Horizon::long_run:
        return "long";
    }
    return "unknown";
}

Horizon horizon_group(std::size_t imf_index, std::size_t total_imfs) {
    if (imf_index < 1 || imf_index > total_imfs)
        throw ValidationError(kModule, "IMF index " + std::to_string(imf_index) + " outside 1.." +
                                           std::to_string(total_imfs));
    if (imf_index <= 2)
        return Horizon::short_run;
    if (imf_index == total_imfs)
        return Horizon::long_run;
    return Horizon::medium_run;
}

Horizon horizon_by_period(std::optional<double> period, const PeriodThresholds& th) {
    if (!period || *period > th.long_min)
        return Horizon::long_run;
    if (*period <= th.short_max)
        return Horizon::short_run;
    return Horizon::medium_run;
}

HorizonRule parse_horizon_rule(std::string_view text) {
    if (text == "index")
        return HorizonRule::by_index;
    if (text == "period")
        return HorizonRule::by_period;
    throw ValidationError(kModule, "unknown horizon rule '" + std::string(text) + "' (expected index|period)");
}

std::vector<ImfFeatureRow> imf_features(const Decomposition& d, std::span<const double> original, HorizonRule rule) {
    if (original.size() != d.size())
        throw ValidationError(kModule, "original series length does not match the decomposition");
    std::vector<ImfFeatureRow> rows;
    if (d.imfs.empty())
        return rows;
    const std::vector<double> shares = variance_share(d);
    for (std::size_t j = 0; j < d.imfs.size(); ++j) {
        const auto& c = d.imfs[j].values;
        ImfFeatureRow row;
        row.imf_index = j + 1;
        row.mean_period = mean_period(c);
        if (auto p = pearson_test(c, original)) {
            row.pearson = p->estimate;
            row.pearson_p = p->p_value;
        }
        if (auto k = kendall_test(c, original)) {
            row.kendall = k->estimate;
            row.kendall_p = k->p_value;
        }
        row.variance_share = shares[j];
        row.horizon = rule == HorizonRule::by_index ? horizon_group(j + 1, d.imfs.size())
                                                    : horizon_by_period(row.mean_period);
        rows.push_back(row);
    }
    return rows;
}

} // namespace eemdkit
