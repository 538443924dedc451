#pragma once

#include "eemdkit/eemd.hpp"
#include "eemdkit/emd.hpp"
#include "eemdkit/series.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eemdkit {

enum class CovarianceEstimator {
    classical, ///< sigma^2 (X'X)^-1 with n - k degrees of freedom
    hc1,       ///< White sandwich with the n / (n - k) small-sample factor
};

struct RegressionSpec {
    std::string dependent;
    std::vector<std::string> regressors;
    std::size_t lag_dependent = 1;
    double alpha = 0.10;
    CovarianceEstimator covariance = CovarianceEstimator::classical;

    void validate() const;
    /// "C", "<dep>(-1)" ... "<dep>(-L)", then the regressors.
    std::vector<std::string> terms() const;
};

struct OlsResult {
    std::vector<std::string> terms;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    double r_squared = 0.0;
    std::size_t n_obs = 0;
    std::size_t dof = 0;
    CovarianceEstimator covariance = CovarianceEstimator::classical;

    /// Position of `term`; throws ValidationError when absent.
    std::size_t index_of(std::string_view term) const;
};

/// Least squares via column-pivoted Householder QR on a column-equilibrated
/// design. `X` must contain its own intercept column. Requires
/// rows > cols + 2 and full column rank; rank deficiency throws
/// NumericalError naming the offending columns.
OlsResult ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::vector<std::string> terms,
                  CovarianceEstimator covariance = CovarianceEstimator::classical);

enum class SafeHavenLabel { strong_safe_haven, weak_safe_haven, hedge, none };
std::string to_string(SafeHavenLabel l);

enum class Taxonomy {
    /// p >= alpha: hedge; significant negative: weak; significant positive: strong.
    sign_significance,
    /// Any significant coefficient: weak safe haven; insignificant: hedge.
    significance_only,
};
std::string to_string(Taxonomy t);
Taxonomy parse_taxonomy(std::string_view text);

struct ScaleClassification {
    std::string regressor;
    std::size_t imf_index = 0;
    SafeHavenLabel label = SafeHavenLabel::none;
    double coefficient = 0.0;
    double p_value = 1.0;
    double alpha = 0.10;
    Taxonomy taxonomy = Taxonomy::sign_significance;
};

/// Pure function of (coefficient, p-value, alpha, taxonomy).
SafeHavenLabel classify_label(double coefficient, double p_value, double alpha, Taxonomy taxonomy);

ScaleClassification classify(const OlsResult& result, const std::string& regressor, std::size_t imf_index,
                             double alpha, Taxonomy taxonomy = Taxonomy::sign_significance);

/// One variable's decomposition, keyed by its panel label.
using NamedDecomposition = std::pair<std::string, Decomposition>;

/// Decomposes each named panel series so all share one IMF count. Series
/// above the smallest count K are decomposed again with max_imfs = K: their
/// first K IMFs are unchanged and the slower modes move into the residue.
/// Returns the names that were re-decomposed.
std::vector<std::string> decompose_common(const AlignedPanel& panel, const std::vector<std::string>& names,
                                          Method method, const EemdConfig& cfg,
                                          std::vector<NamedDecomposition>& out);

/// Re-decomposes entries of `decs` named in `names` down to their smallest
/// IMF count, as decompose_common does. Returns the names re-decomposed.
std::vector<std::string> harmonize_imf_counts(std::vector<NamedDecomposition>& decs,
                                              const std::vector<std::string>& names, const AlignedPanel& panel,
                                              Method method, const EemdConfig& cfg);

struct ScaleFit {
    std::size_t imf_index = 0;
    std::optional<OlsResult> result; ///< empty when this scale failed
    std::string error;
    std::vector<ScaleClassification> classifications;
};

/// Fits the lagged-dependent regression at every IMF index, using IMF j of
/// every variable. A failing scale is reported in its ScaleFit; the others
/// are unaffected. Throws ValidationError when IMF counts or lengths differ.
std::vector<ScaleFit> multiscale_fit(std::span<const NamedDecomposition> panel, const RegressionSpec& spec,
                                     Taxonomy taxonomy = Taxonomy::sign_significance);

/// Builds the per-scale design: rows t = L..N-1, columns
/// [1, y(t-1) .. y(t-L), regressors(t)].
std::pair<Eigen::VectorXd, Eigen::MatrixXd> lagged_design(std::span<const double> dependent,
                                                          std::span<const std::span<const double>> regressors,
                                                          std::size_t lag);

} // namespace eemdkit
