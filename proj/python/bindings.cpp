#include "eemdkit/app/commands.hpp"
#include "eemdkit/decomposition_io.hpp"
#include "eemdkit/eemd.hpp"
#include "eemdkit/error.hpp"
#include "eemdkit/hilbert.hpp"
#include "eemdkit/metrics.hpp"
#include "eemdkit/regression.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace eemdkit;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1)
        throw ValidationError("python", "expected a one-dimensional array");
    return {a.data(), a.data() + a.size()};
}

py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

SiftConfig make_sift(double sd_threshold, std::size_t max_sift_iters, std::optional<std::size_t> max_imfs,
                     const std::string& boundary) {
    SiftConfig s;
    s.sd_threshold = sd_threshold;
    s.max_sift_iters = max_sift_iters;
    s.max_imfs = max_imfs;
    s.boundary = parse_boundary_policy(boundary);
    return s;
}

py::array_t<double> imf_matrix(const Decomposition& d) {
    const auto k = static_cast<py::ssize_t>(d.imfs.size());
    const auto n = static_cast<py::ssize_t>(d.size());
    py::array_t<double> out({k, n});
    auto m = out.mutable_unchecked<2>();
    for (py::ssize_t j = 0; j < k; ++j)
        for (py::ssize_t t = 0; t < n; ++t)
            m(j, t) = d.imfs[static_cast<std::size_t>(j)].values[static_cast<std::size_t>(t)];
    return out;
}

py::dict ols_dict(const OlsResult& r) {
    py::dict d;
    d["terms"] = r.terms;
    d["coefficients"] = r.coefficients;
    d["std_errors"] = r.std_errors;
    d["t_stats"] = r.t_stats;
    d["p_values"] = r.p_values;
    d["r_squared"] = r.r_squared;
    d["n_obs"] = r.n_obs;
    d["dof"] = r.dof;
    return d;
}

CovarianceEstimator covariance(bool robust_se) {
    return robust_se ? CovarianceEstimator::hc1 : CovarianceEstimator::classical;
}

} // namespace

PYBIND11_MODULE(_eemdkit, m) {
    m.doc() = "Empirical mode decomposition, ensemble EMD and multiscale regression";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    py::class_<Decomposition>(m, "Decomposition")
        .def_property_readonly("imfs", &imf_matrix, "IMFs as a (K, N) array, high frequency first")
        .def_property_readonly("residue", [](const Decomposition& d) { return to_array(d.residue); })
        .def_property_readonly("method", [](const Decomposition& d) { return to_string(d.method); })
        .def_property_readonly("n_imfs", [](const Decomposition& d) { return d.imfs.size(); })
        .def_property_readonly("sift_iterations",
                               [](const Decomposition& d) {
                                   std::vector<std::size_t> v;
                                   for (const auto& imf : d.imfs)
                                       v.push_back(imf.sift_iterations);
                                   return v;
                               })
        .def_property_readonly("trial_coverage", [](const Decomposition& d) { return d.trial_coverage; })
        .def("reconstruct", [](const Decomposition& d) { return to_array(d.reconstruct()); })
        .def("__len__", &Decomposition::size);

    m.def(
        "emd",
        [](const Array& x, double sd_threshold, std::size_t max_sift_iters, std::optional<std::size_t> max_imfs,
           const std::string& boundary) {
            const auto v = to_vector(x);
            const auto sift = make_sift(sd_threshold, max_sift_iters, max_imfs, boundary);
            py::gil_scoped_release release;
            return emd(v, sift);
        },
        py::arg("x"), py::arg("sd_threshold") = 0.2, py::arg("max_sift_iters") = 100,
        py::arg("max_imfs") = py::none(), py::arg("boundary") = "mirror");

    m.def(
        "eemd",
        [](const Array& x, double noise_std, std::size_t ensemble_size, std::uint64_t seed, unsigned threads,
           double sd_threshold, std::size_t max_sift_iters, std::optional<std::size_t> max_imfs,
           const std::string& boundary) {
            const auto v = to_vector(x);
            EemdConfig cfg;
            cfg.noise_std = noise_std;
            cfg.ensemble_size = ensemble_size;
            cfg.seed = seed;
            cfg.threads = threads;
            cfg.sift = make_sift(sd_threshold, max_sift_iters, max_imfs, boundary);
            py::gil_scoped_release release;
            return eemd(v, cfg);
        },
        py::arg("x"), py::arg("noise_std") = 0.2, py::arg("ensemble_size") = 100, py::arg("seed") = 42,
        py::arg("threads") = 0, py::arg("sd_threshold") = 0.2, py::arg("max_sift_iters") = 100,
        py::arg("max_imfs") = py::none(), py::arg("boundary") = "mirror");

    m.def("read_decomposition", &read_decomposition, py::arg("stem"));

    m.def("mean_period", [](const Array& x) { return mean_period(to_vector(x)); });
    m.def("pearson", [](const Array& a, const Array& b) { return pearson(to_vector(a), to_vector(b)); });
    m.def("kendall_tau", [](const Array& a, const Array& b) { return kendall_tau(to_vector(a), to_vector(b)); });
    m.def("pearson_test", [](const Array& a, const Array& b) -> std::optional<std::pair<double, double>> {
        const auto r = pearson_test(to_vector(a), to_vector(b));
        return r ? std::optional(std::pair(r->estimate, r->p_value)) : std::nullopt;
    });
    m.def("kendall_test", [](const Array& a, const Array& b) -> std::optional<std::pair<double, double>> {
        const auto r = kendall_test(to_vector(a), to_vector(b));
        return r ? std::optional(std::pair(r->estimate, r->p_value)) : std::nullopt;
    });
    m.def("variance_share", [](const Decomposition& d) { return to_array(variance_share(d)); });

    m.def(
        "imf_features",
        [](const Decomposition& d, const Array& original, const std::string& rule) {
            py::list rows;
            for (const auto& r : imf_features(d, to_vector(original), parse_horizon_rule(rule))) {
                py::dict row;
                row["imf"] = r.imf_index;
                row["mean_period"] = r.mean_period;
                row["pearson"] = r.pearson;
                row["pearson_p"] = r.pearson_p;
                row["kendall"] = r.kendall;
                row["kendall_p"] = r.kendall_p;
                row["variance_share"] = r.variance_share;
                row["horizon"] = to_string(r.horizon);
                rows.append(row);
            }
            return rows;
        },
        py::arg("decomposition"), py::arg("original"), py::arg("rule") = "index");

    m.def("analytic_signal", [](const Array& x) { return analytic_signal(to_vector(x)); });
    m.def("instantaneous_profile", [](const Array& x) {
        const auto p = instantaneous_profile(analytic_signal(to_vector(x)));
        py::dict d;
        d["amplitude"] = to_array(p.amplitude);
        d["frequency"] = to_array(p.frequency);
        d["reliable"] = std::vector<bool>(p.reliable.begin(), p.reliable.end());
        return d;
    });

    m.def(
        "ols_fit",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::vector<std::string> terms, bool robust_se) {
            return ols_dict(ols_fit(y, X, std::move(terms), covariance(robust_se)));
        },
        py::arg("y"), py::arg("X"), py::arg("terms"), py::arg("robust_se") = false);

    m.def(
        "multiscale_fit",
        [](const std::vector<std::pair<std::string, Decomposition>>& panel, const std::string& dependent,
           const std::vector<std::string>& regressors, std::size_t lag_dependent, double alpha, bool robust_se,
           const std::string& taxonomy) {
            RegressionSpec spec;
            spec.dependent = dependent;
            spec.regressors = regressors;
            spec.lag_dependent = lag_dependent;
            spec.alpha = alpha;
            spec.covariance = covariance(robust_se);
            py::list out;
            for (const auto& fit : multiscale_fit(panel, spec, parse_taxonomy(taxonomy))) {
                py::dict d;
                d["imf"] = fit.imf_index;
                d["result"] = fit.result ? py::object(ols_dict(*fit.result)) : py::none();
                d["error"] = fit.error;
                py::dict labels;
                for (const auto& c : fit.classifications)
                    labels[py::str(c.regressor)] = to_string(c.label);
                d["labels"] = labels;
                out.append(d);
            }
            return out;
        },
        py::arg("panel"), py::arg("dependent"), py::arg("regressors"), py::arg("lag_dependent") = 1,
        py::arg("alpha") = 0.10, py::arg("robust_se") = false, py::arg("taxonomy") = "sign-significance");

    m.def(
        "run_pipeline",
        [](const app::fs::path& config, std::optional<app::fs::path> out, std::optional<std::uint64_t> seed,
           std::optional<unsigned> threads) {
            app::PipelineOverrides o{std::move(out), seed, threads};
            return app::run_pipeline(config, o);
        },
        py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(), py::arg("threads") = py::none(),
        "Runs the configured pipeline and returns the manifest path.");

    m.attr("__version__") = app::version_string().substr(std::string("eemdkit ").size());
}
