#include "eemdkit/regression.hpp"

#include "eemdkit/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace eemdkit {

namespace {

constexpr const char* kModule = "multiscale-regression";

// Pivots below this fraction of the largest |R_ii| (on unit-norm columns)
// count as linearly dependent.
constexpr double kRankTolerance = 1e-10;
// A column this much smaller than the largest one is numerically zero.
constexpr double kZeroColumn = 1e-14;

double two_sided_p(double t, double dof) {
    if (std::isnan(t))
        return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t))
        return 0.0;
    boost::math::students_t dist(dof);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

} // namespace

void RegressionSpec::validate() const {
    if (dependent.empty())
        throw ValidationError(kModule, "regression needs a dependent variable");
    if (std::find(regressors.begin(), regressors.end(), dependent) != regressors.end())
        throw ValidationError(kModule, "dependent '" + dependent + "' is also listed as a regressor");
    for (std::size_t i = 0; i < regressors.size(); ++i)
        for (std::size_t j = i + 1; j < regressors.size(); ++j)
            if (regressors[i] == regressors[j])
                throw ValidationError(kModule, "regressor '" + regressors[i] + "' listed twice");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError(kModule, "alpha must lie in (0, 1)");
}

std::vector<std::string> RegressionSpec::terms() const {
    std::vector<std::string> t{"C"};
    for (std::size_t l = 1; l <= lag_dependent; ++l)
        t.push_back(dependent + "(-" + std::to_string(l) + ")");
    t.insert(t.end(), regressors.begin(), regressors.end());
    return t;
}

std::size_t OlsResult::index_of(std::string_view term) const {
    auto it = std::find(terms.begin(), terms.end(), term);
    if (it == terms.end())
        throw ValidationError(kModule, "term '" + std::string(term) + "' not in regression");
    return static_cast<std::size_t>(it - terms.begin());
}

OlsResult ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::vector<std::string> terms,
                  CovarianceEstimator covariance) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != n)
        throw ValidationError(kModule, "response has " + std::to_string(y.size()) + " rows, design has " +
                                           std::to_string(n));
    if (static_cast<Eigen::Index>(terms.size()) != k)
        throw ValidationError(kModule, "term labels do not match design columns");
    if (n <= k + 2)
        throw ValidationError(kModule, "need more than " + std::to_string(k + 2) + " observations for " +
                                           std::to_string(k) + " terms, got " + std::to_string(n));
    if (!y.allFinite() || !X.allFinite())
        throw ValidationError(kModule, "regression input contains non-finite values");

    auto rank_error = [&](const std::vector<Eigen::Index>& cols) {
        std::string names;
        for (auto c : cols)
            names += (names.empty() ? "" : ", ") + terms[static_cast<std::size_t>(c)];
        return NumericalError(kModule, "design matrix is rank deficient; collinear or zero columns: " + names);
    };

    Eigen::VectorXd norms = X.colwise().norm();
    const double largest = norms.maxCoeff();
    std::vector<Eigen::Index> zero_cols;
    for (Eigen::Index j = 0; j < k; ++j)
        if (!(norms(j) > kZeroColumn * largest))
            zero_cols.push_back(j);
    if (!zero_cols.empty())
        throw rank_error(zero_cols);

    const Eigen::MatrixXd Xs = X * norms.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < k) {
        std::vector<Eigen::Index> dependent;
        for (Eigen::Index j = qr.rank(); j < k; ++j)
            dependent.push_back(qr.colsPermutation().indices()(j));
        std::sort(dependent.begin(), dependent.end());
        throw rank_error(dependent);
    }

    const Eigen::VectorXd beta_s = qr.solve(y);
    const Eigen::VectorXd beta = beta_s.cwiseQuotient(norms);
    const Eigen::VectorXd resid = y - X * beta;

    // (Xs'Xs)^-1 = P R^-1 R^-T P'
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const auto& perm = qr.colsPermutation();
    const Eigen::MatrixXd bread_s = perm * (Rinv * Rinv.transpose()) * perm.transpose();
    const Eigen::VectorXd inv_norms = norms.cwiseInverse();
    const Eigen::MatrixXd bread = inv_norms.asDiagonal() * bread_s * inv_norms.asDiagonal();

    const double dof = static_cast<double>(n - k);
    const double sse = resid.squaredNorm();
    Eigen::MatrixXd cov;
    if (covariance == CovarianceEstimator::classical) {
        cov = bread * (sse / dof);
    } else {
        const Eigen::MatrixXd meat = X.transpose() * resid.array().square().matrix().asDiagonal() * X;
        cov = bread * meat * bread * (static_cast<double>(n) / dof);
    }

    OlsResult r;
    r.terms = std::move(terms);
    r.n_obs = static_cast<std::size_t>(n);
    r.dof = static_cast<std::size_t>(n - k);
    r.covariance = covariance;
    for (Eigen::Index j = 0; j < k; ++j) {
        const double b = beta(j);
        const double se = std::sqrt(std::max(cov(j, j), 0.0));
        double t;
        if (se > 0.0)
            t = b / se;
        else
            t = b == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), b);
        r.coefficients.push_back(b);
        r.std_errors.push_back(se);
        r.t_stats.push_back(t);
        r.p_values.push_back(se > 0.0 || b != 0.0 ? two_sided_p(t, dof) : 1.0);
    }

    const double ybar = y.mean();
    const double sst = (y.array() - ybar).square().sum();
    r.r_squared = sst > 0.0 ? std::clamp(1.0 - sse / sst, 0.0, 1.0) : 0.0;
    return r;
}

std::string to_string(SafeHavenLabel l) {
    switch (l) {
    case SafeHavenLabel::strong_safe_haven:
        return "strong-safe-haven";
    case SafeHavenLabel::weak_safe_haven:
        return "weak-safe-haven";
    case SafeHavenLabel::hedge:
        return "hedge";
    case SafeHavenLabel::none:
        return "none";
    }
    return "none";
}

std::string to_string(Taxonomy t) {
    return t == Taxonomy::sign_significance ? "sign-significance" : "significance-only";
}

Taxonomy parse_taxonomy(std::string_view text) {
    if (text == "sign-significance")
        return Taxonomy::sign_significance;
    if (text == "significance-only")
        return Taxonomy::significance_only;
    throw ValidationError(kModule, "unknown taxonomy '" + std::string(text) +
                                       "' (expected sign-significance|significance-only)");
}

SafeHavenLabel classify_label(double coefficient, double p_value, double alpha, Taxonomy taxonomy) {
    if (std::isnan(p_value) || std::isnan(coefficient))
        return SafeHavenLabel::none;
    if (p_value >= alpha)
        return SafeHavenLabel::hedge;
    if (taxonomy == Taxonomy::significance_only)
        return SafeHavenLabel::weak_safe_haven;
    if (coefficient < 0.0)
        return SafeHavenLabel::weak_safe_haven;
    if (coefficient > 0.0)
        return SafeHavenLabel::strong_safe_haven;
    return SafeHavenLabel::none;
}

ScaleClassification classify(const OlsResult& result, const std::string& regressor, std::size_t imf_index,
                             double alpha, Taxonomy taxonomy) {
    const std::size_t j = result.index_of(regressor);
    ScaleClassification c;
    c.regressor = regressor;
    c.imf_index = imf_index;
    c.coefficient = result.coefficients[j];
    c.p_value = result.p_values[j];
    c.alpha = alpha;
    c.taxonomy = taxonomy;
    c.label = classify_label(c.coefficient, c.p_value, alpha, taxonomy);
    return c;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> lagged_design(std::span<const double> dependent,
                                                          std::span<const std::span<const double>> regressors,
                                                          std::size_t lag) {
    const std::size_t n = dependent.size();
    for (const auto& r : regressors)
        if (r.size() != n)
            throw ValidationError(kModule, "regressor length differs from the dependent series");
    if (n <= lag)
        throw ValidationError(kModule, "series too short for lag " + std::to_string(lag));
    const auto rows = static_cast<Eigen::Index>(n - lag);
    const auto cols = static_cast<Eigen::Index>(1 + lag + regressors.size());
    Eigen::VectorXd y(rows);
    Eigen::MatrixXd X(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::size_t t = static_cast<std::size_t>(i) + lag;
        y(i) = dependent[t];
        X(i, 0) = 1.0;
        for (std::size_t l = 1; l <= lag; ++l)
            X(i, static_cast<Eigen::Index>(l)) = dependent[t - l];
        for (std::size_t r = 0; r < regressors.size(); ++r)
            X(i, static_cast<Eigen::Index>(1 + lag + r)) = regressors[r][t];
    }
    return {std::move(y), std::move(X)};
}

std::vector<ScaleFit> multiscale_fit(std::span<const NamedDecomposition> panel, const RegressionSpec& spec,
                                     Taxonomy taxonomy) {
    spec.validate();
    auto find = [&](const std::string& name) -> const Decomposition& {
        for (const auto& [label, d] : panel)
            if (label == name)
                return d;
        throw ValidationError(kModule, "panel has no decomposition for '" + name + "'");
    };

    const Decomposition& dep = find(spec.dependent);
    std::vector<const Decomposition*> regs;
    for (const auto& r : spec.regressors)
        regs.push_back(&find(r));

    bool mismatch = false;
    for (const auto* d : regs)
        mismatch = mismatch || d->imfs.size() != dep.imfs.size();
    if (mismatch) {
        std::string counts = spec.dependent + "=" + std::to_string(dep.imfs.size());
        for (std::size_t i = 0; i < regs.size(); ++i)
            counts += ", " + spec.regressors[i] + "=" + std::to_string(regs[i]->imfs.size());
        throw ValidationError(kModule, "IMF counts differ across series: " + counts);
    }
    for (std::size_t i = 0; i < regs.size(); ++i)
        if (regs[i]->size() != dep.size())
            throw ValidationError(kModule, "series '" + spec.regressors[i] + "' has a different length");
    if (dep.imfs.empty())
        throw ValidationError(kModule, "decompositions contain no IMFs");

    const std::vector<std::string> terms = spec.terms();
    std::vector<ScaleFit> out;
    for (std::size_t j = 0; j < dep.imfs.size(); ++j) {
        ScaleFit fit;
        fit.imf_index = j + 1;
        std::vector<std::span<const double>> cols;
        for (const auto* d : regs)
            cols.emplace_back(d->imfs[j].values);
        try {
            auto [y, X] = lagged_design(dep.imfs[j].values, cols, spec.lag_dependent);
            fit.result = ols_fit(y, X, terms, spec.covariance);
            for (const auto& r : spec.regressors)
                fit.classifications.push_back(classify(*fit.result, r, j + 1, spec.alpha, taxonomy));
        } catch (const Error& e) {
            fit.result.reset();
            fit.error = e.what();
        }
        out.push_back(std::move(fit));
    }
    return out;
}

std::vector<std::string> harmonize_imf_counts(std::vector<NamedDecomposition>& decs,
                                              const std::vector<std::string>& names, const AlignedPanel& panel,
                                              Method method, const EemdConfig& cfg) {
    const auto wanted = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
    std::size_t k = std::numeric_limits<std::size_t>::max();
    for (const auto& [name, d] : decs)
        if (wanted(name))
            k = std::min(k, d.imfs.size());
    std::vector<std::string> redone;
    if (k == 0 || k == std::numeric_limits<std::size_t>::max())
        return redone;
    EemdConfig capped = cfg;
    capped.sift.max_imfs = k;
    for (auto& [name, d] : decs) {
        if (d.imfs.size() <= k || !wanted(name))
            continue;
        d = method == Method::emd ? emd(panel.at(name), capped.sift) : eemd(panel.at(name), capped);
        redone.push_back(name);
    }
    return redone;
}

std::vector<std::string> decompose_common(const AlignedPanel& panel, const std::vector<std::string>& names,
                                          Method method, const EemdConfig& cfg,
                                          std::vector<NamedDecomposition>& out) {
    out.clear();
    for (const auto& name : names)
        out.emplace_back(name, method == Method::emd ? emd(panel.at(name), cfg.sift) : eemd(panel.at(name), cfg));
    return harmonize_imf_counts(out, names, panel, method, cfg);
}

} // namespace eemdkit
