#include "eemdkit/emd.hpp"

#include "eemdkit/error.hpp"
#include "eemdkit/spline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace eemdkit {

namespace {

constexpr const char* kModule = "emd-engine";
constexpr double kNegligibleResidue = 1e-10;
constexpr std::size_t kMirrorCount = 2;

using Indices = std::vector<std::size_t>;

// Elements [first, last) of v, reversed; bounds are clipped to v.
Indices reversed_slice(const Indices& v, std::ptrdiff_t first, std::ptrdiff_t last) {
    first = std::max<std::ptrdiff_t>(first, 0);
    last = std::min<std::ptrdiff_t>(last, static_cast<std::ptrdiff_t>(v.size()));
    Indices out;
    for (std::ptrdiff_t i = last - 1; i >= first; --i)
        out.push_back(v[static_cast<std::size_t>(i)]);
    return out;
}

struct Knots {
    std::vector<double> t;
    std::vector<double> y;
};

// Mirror extension: the nearest extrema at each end are reflected about
// either the first/last extremum or the end sample, whichever keeps the
// alternation of maxima and minima intact.
void mirror_knots(std::span<const double> x, const Indices& imax, const Indices& imin, Knots& upper, Knots& lower) {
    const auto nb = static_cast<std::ptrdiff_t>(kMirrorCount);
    const std::size_t last = x.size() - 1;
    const auto nmax = static_cast<std::ptrdiff_t>(imax.size());
    const auto nmin = static_cast<std::ptrdiff_t>(imin.size());

    Indices lmax, lmin, rmax, rmin;
    std::size_t lsym = 0, rsym = last;

    if (imax.front() < imin.front()) {
        if (x[0] > x[imin.front()]) {
            lmax = reversed_slice(imax, 1, nb + 1);
            lmin = reversed_slice(imin, 0, nb);
            lsym = imax.front();
        } else {
            lmax = reversed_slice(imax, 0, nb);
            lmin = reversed_slice(imin, 0, nb - 1);
            lmin.push_back(0);
            lsym = 0;
        }
    } else {
        if (x[0] < x[imax.front()]) {
            lmax = reversed_slice(imax, 0, nb);
            lmin = reversed_slice(imin, 1, nb + 1);
            lsym = imin.front();
        } else {
            lmax = reversed_slice(imax, 0, nb - 1);
            lmax.push_back(0);
            lmin = reversed_slice(imin, 0, nb);
            lsym = 0;
        }
    }

    if (imax.back() < imin.back()) {
        if (x[last] < x[imax.back()]) {
            rmax = reversed_slice(imax, nmax - nb, nmax);
            rmin = reversed_slice(imin, nmin - nb - 1, nmin - 1);
            rsym = imin.back();
        } else {
            rmax = reversed_slice(imax, nmax - nb + 1, nmax);
            rmax.insert(rmax.begin(), last);
            rmin = reversed_slice(imin, nmin - nb, nmin);
            rsym = last;
        }
    } else {
        if (x[last] > x[imin.back()]) {
            rmax = reversed_slice(imax, nmax - nb - 1, nmax - 1);
            rmin = reversed_slice(imin, nmin - nb, nmin);
            rsym = imax.back();
        } else {
            rmax = reversed_slice(imax, nmax - nb, nmax);
            rmin = reversed_slice(imin, nmin - nb + 1, nmin);
            rmin.insert(rmin.begin(), last);
            rsym = last;
        }
    }

    auto reflect = [](const Indices& idx, std::size_t sym) {
        std::vector<double> t;
        for (std::size_t i : idx)
            t.push_back(2.0 * static_cast<double>(sym) - static_cast<double>(i));
        return t;
    };
    std::vector<double> tlmax = reflect(lmax, lsym), tlmin = reflect(lmin, lsym);
    std::vector<double> trmax = reflect(rmax, rsym), trmin = reflect(rmin, rsym);

    // Reflected knots must reach past the ends; otherwise reflect about the end sample.
    if (tlmax.empty() || tlmin.empty() || tlmax.front() > 0.0 || tlmin.front() > 0.0) {
        if (lsym == imax.front())
            lmax = reversed_slice(imax, 0, nb);
        else
            lmin = reversed_slice(imin, 0, nb);
        lsym = 0;
        tlmax = reflect(lmax, lsym);
        tlmin = reflect(lmin, lsym);
    }
    const auto end = static_cast<double>(last);
    if (trmax.empty() || trmin.empty() || trmax.back() < end || trmin.back() < end) {
        if (rsym == imax.back())
            rmax = reversed_slice(imax, nmax - nb, nmax);
        else
            rmin = reversed_slice(imin, nmin - nb, nmin);
        rsym = last;
        trmax = reflect(rmax, rsym);
        trmin = reflect(rmin, rsym);
    }

    auto assemble = [&](Knots& k, const std::vector<double>& tl, const Indices& il, const Indices& mid,
                        const std::vector<double>& tr, const Indices& ir) {
        for (std::size_t i = 0; i < tl.size(); ++i) {
            k.t.push_back(tl[i]);
            k.y.push_back(x[il[i]]);
        }
        for (std::size_t i : mid) {
            k.t.push_back(static_cast<double>(i));
            k.y.push_back(x[i]);
        }
        for (std::size_t i = 0; i < tr.size(); ++i) {
            k.t.push_back(tr[i]);
            k.y.push_back(x[ir[i]]);
        }
    };
    assemble(upper, tlmax, lmax, imax, trmax, rmax);
    assemble(lower, tlmin, lmin, imin, trmin, rmin);
}

void clamp_knots(std::span<const double> x, const std::vector<Extremum>& ext, Knots& k) {
    k.t.push_back(0.0);
    k.y.push_back(x.front());
    for (const auto& e : ext) {
        k.t.push_back(static_cast<double>(e.index));
        k.y.push_back(e.value);
    }
    k.t.push_back(static_cast<double>(x.size() - 1));
    k.y.push_back(x.back());
}

// Knots may coincide after reflection in degenerate layouts; keep the first.
void sort_unique(Knots& k) {
    std::vector<std::size_t> order(k.t.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return k.t[a] < k.t[b]; });
    Knots out;
    for (std::size_t i : order) {
        if (!out.t.empty() && out.t.back() == k.t[i])
            continue;
        out.t.push_back(k.t[i]);
        out.y.push_back(k.y[i]);
    }
    k = std::move(out);
}

Indices indices_of(const std::vector<Extremum>& ext) {
    Indices out;
    out.reserve(ext.size());
    for (const auto& e : ext)
        out.push_back(e.index);
    return out;
}

std::optional<std::pair<Knots, Knots>> envelope_knots(std::span<const double> x, const Extrema& ext,
                                                      BoundaryPolicy boundary) {
    Knots upper, lower;
    if (boundary == BoundaryPolicy::clamp) {
        clamp_knots(x, ext.maxima, upper);
        clamp_knots(x, ext.minima, lower);
    } else {
        if (ext.maxima.empty() || ext.minima.empty())
            return std::nullopt;
        mirror_knots(x, indices_of(ext.maxima), indices_of(ext.minima), upper, lower);
    }
    sort_unique(upper);
    sort_unique(lower);
    return std::make_pair(std::move(upper), std::move(lower));
}

double sum_squares(std::span<const double> v) {
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return s;
}

std::size_t imf_extrema_mismatch(std::span<const double> h) {
    const std::size_t zc = count_zero_crossings(h);
    const std::size_t ne = find_extrema(h).count();
    return zc > ne ? zc - ne : ne - zc;
}

} // namespace

std::string to_string(BoundaryPolicy p) {
    return p == BoundaryPolicy::mirror ? "mirror" : "clamp";
}

BoundaryPolicy parse_boundary_policy(std::string_view text) {
    if (text == "mirror")
        return BoundaryPolicy::mirror;
    if (text == "clamp")
        return BoundaryPolicy::clamp;
    throw ValidationError(kModule, "unknown boundary policy '" + std::string(text) + "' (expected mirror|clamp)");
}

std::string to_string(Method m) {
    return m == Method::emd ? "EMD" : "EEMD";
}

void SiftConfig::validate() const {
    if (!(sd_threshold > 0.0) || !std::isfinite(sd_threshold))
        throw ValidationError(kModule, "sd_threshold must be positive");
    if (max_sift_iters < 1)
        throw ValidationError(kModule, "max_sift_iters must be at least 1");
    if (max_imfs && *max_imfs < 1)
        throw ValidationError(kModule, "max_imfs must be at least 1 (or automatic)");
}

std::size_t SiftConfig::resolved_max_imfs(std::size_t n) const {
    if (max_imfs)
        return *max_imfs;
    const auto log2n = static_cast<std::size_t>(std::bit_width(n)) - 1;
    return log2n > 1 ? log2n - 1 : 1;
}

Extrema find_extrema(std::span<const double> x) {
    Extrema out;
    const std::size_t n = x.size();
    if (n < 3)
        return out;
    std::size_t i = 1;
    while (i + 1 < n) {
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i])
            ++j;
        if (j + 1 >= n)
            break; // flat run reaching the end
        const double v = x[i];
        if (x[i - 1] < v && x[j + 1] < v)
            out.maxima.push_back({(i + j) / 2, v});
        else if (x[i - 1] > v && x[j + 1] > v)
            out.minima.push_back({(i + j) / 2, v});
        i = j + 1;
    }
    return out;
}

std::size_t count_zero_crossings(std::span<const double> x) {
    std::size_t count = 0;
    int sign = 0;
    for (double v : x) {
        const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s == 0)
            continue;
        if (sign != 0 && s != sign)
            ++count;
        sign = s;
    }
    return count;
}

std::optional<std::vector<double>> envelope(std::span<const double> x, const Extrema& extrema, EnvelopeSide side,
                                            BoundaryPolicy boundary) {
    if (x.size() < 3)
        return std::nullopt;
    auto knots = envelope_knots(x, extrema, boundary);
    if (!knots)
        return std::nullopt;
    const Knots& k = side == EnvelopeSide::upper ? knots->first : knots->second;
    if (k.t.size() < 2)
        return std::nullopt;
    return NaturalCubicSpline(k.t, k.y).sample(x.size());
}

std::optional<Envelopes> envelopes(std::span<const double> x, BoundaryPolicy boundary) {
    if (x.size() < 3)
        return std::nullopt;
    const Extrema ext = find_extrema(x);
    if (ext.maxima.empty() || ext.minima.empty())
        return std::nullopt;
    auto knots = envelope_knots(x, ext, boundary);
    if (!knots || knots->first.t.size() < 2 || knots->second.t.size() < 2)
        return std::nullopt;
    Envelopes e;
    e.upper = NaturalCubicSpline(knots->first.t, knots->first.y).sample(x.size());
    e.lower = NaturalCubicSpline(knots->second.t, knots->second.y).sample(x.size());
    e.mean.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        e.mean[i] = (e.lower[i] + e.upper[i]) / 2.0;
    return e;
}

std::optional<SiftStep> sift_once(std::span<const double> x, const SiftConfig& config) {
    auto env = envelopes(x, config.boundary);
    if (!env)
        return std::nullopt;
    SiftStep step;
    step.candidate.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        step.candidate[i] = x[i] - env->mean[i];
    step.envelope_mean = std::move(env->mean);
    return step;
}

std::optional<Imf> extract_imf(std::span<const double> x, const SiftConfig& config) {
    config.validate();
    std::vector<double> h(x.begin(), x.end());
    Imf imf;
    for (std::size_t it = 0; it < config.max_sift_iters; ++it) {
        auto step = sift_once(h, config);
        if (!step) {
            if (it == 0)
                return std::nullopt;
            break;
        }
        const double denom = sum_squares(h);
        double num = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double d = h[i] - step->candidate[i];
            num += d * d;
        }
        h = std::move(step->candidate);
        imf.sift_iterations = it + 1;
        const double sd = denom > 0.0 ? num / denom : 0.0;
        if (sd < config.sd_threshold && imf_extrema_mismatch(h) <= 1) {
            imf.converged = true;
            break;
        }
    }
    imf.values = std::move(h);
    return imf;
}

std::vector<double> Decomposition::reconstruct() const {
    std::vector<double> out = residue;
    for (const auto& imf : imfs)
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += imf.values[i];
    return out;
}

Decomposition emd(std::span<const double> x, const SiftConfig& config) {
    config.validate();
    if (x.size() < 4)
        throw ValidationError(kModule, "emd needs at least 4 samples, got " + std::to_string(x.size()));
    for (double v : x)
        if (!std::isfinite(v))
            throw ValidationError(kModule, "emd input contains a non-finite value");

    Decomposition d;
    d.method = Method::emd;
    d.sift = config;
    d.residue.assign(x.begin(), x.end());
    const std::size_t max_imfs = config.resolved_max_imfs(x.size());
    double scale = 0.0;
    for (double v : x)
        scale = std::max(scale, std::abs(v));
    while (d.imfs.size() < max_imfs) {
        // A lone max/min pair is a trend, not an oscillation; and once the
        // residue is down to rounding noise there is nothing left to sift.
        if (find_extrema(d.residue).count() < 3)
            break;
        double left = 0.0;
        for (double v : d.residue)
            left = std::max(left, std::abs(v));
        if (left <= kNegligibleResidue * scale)
            break;
        auto imf = extract_imf(d.residue, config);
        if (!imf)
            break;
        imf->index = d.imfs.size() + 1;
        for (std::size_t i = 0; i < d.residue.size(); ++i)
            d.residue[i] -= imf->values[i];
        d.imfs.push_back(std::move(*imf));
    }
    return d;
}

Decomposition emd(const TimeSeries& x, const SiftConfig& config) {
    x.validate();
    Decomposition d = emd(std::span<const double>(x.values), config);
    d.source = x.name;
    d.dates = x.dates;
    return d;
}

double orthogonality_index(const Decomposition& d, std::span<const double> x) {
    const double energy = sum_squares(x);
    if (energy == 0.0)
        return 0.0;
    double cross = 0.0;
    for (std::size_t j = 0; j < d.imfs.size(); ++j)
        for (std::size_t k = 0; k < d.imfs.size(); ++k) {
            if (j == k)
                continue;
            for (std::size_t t = 0; t < x.size(); ++t)
                cross += d.imfs[j].values[t] * d.imfs[k].values[t];
        }
    return std::abs(cross) / energy;
}

} // namespace eemdkit
