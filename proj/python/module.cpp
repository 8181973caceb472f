#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bcvrank/harness.hpp"
#include "bcvrank/rng.hpp"

namespace py = pybind11;
using namespace bcvrank;

namespace {

DataMatrix as_data(const Matrix& y) { return DataMatrix(y); }

py::dict curve_to_dict(const BcvCurve& curve) {
    py::dict out;
    out["ks"] = curve.ks;
    out["pe"] = curve.pe;
    out["pe_mean"] = curve.pe_mean;
    out["khat"] = curve.khat;
    out["truncated_at"] =
        curve.truncated_at ? py::cast(*curve.truncated_at) : py::none();
    return out;
}

SelectorConfig selector_config(int kmax, int n_perm, double pa_quantile,
                               bool pa_use_covariance, std::optional<double> ed_delta,
                               std::optional<int> er_kmax, bool ne_full_scan) {
    SelectorConfig cfg;
    cfg.kmax = kmax;
    cfg.n_perm = n_perm;
    cfg.pa_quantile = pa_quantile;
    cfg.pa_use_covariance = pa_use_covariance;
    cfg.ed_delta = ed_delta;
    cfg.er_kmax = er_kmax;
    cfg.ne_full_scan = ne_full_scan;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Low-rank signal recovery under heteroscedastic noise: "
              "early-stopping alternation, bi-cross-validation rank selection, "
              "baseline selectors and a simulation generator.";

    py::register_exception<Error>(m, "BcvrankError");

    py::class_<FactorFit>(m, "FactorFit")
        .def_property_readonly("xhat", [](const FactorFit& f) { return f.xhat; })
        .def_property_readonly("sigma2",
                               [](const FactorFit& f) { return f.sigma2hat.sigma2; })
        .def_readonly("k", &FactorFit::k)
        .def_readonly("m", &FactorFit::m)
        .def("__repr__", [](const FactorFit& f) {
            return "<FactorFit k=" + std::to_string(f.k) + " m=" + std::to_string(f.m) +
                   ">";
        });

    // estimation
    m.def(
        "esa_fit",
        [](const Matrix& y, int k, int m) { return esa::esa_fit(as_data(y), k, m); },
        py::arg("y"), py::arg("k"), py::arg("m") = 3,
        "Early-stopping alternation fit of the rank-k signal.");
    m.def(
        "init_sigma",
        [](const Matrix& y) { return esa::init_sigma(as_data(y)).sigma2; },
        py::arg("y"), "Row-wise sample variances (1/n normalization).");
    m.def(
        "log_likelihood",
        [](const Matrix& y, const Matrix& x, const Vector& sigma2) {
            return esa::log_likelihood(as_data(y), x, DiagonalVariances(sigma2));
        },
        py::arg("y"), py::arg("x"), py::arg("sigma2"));

    // bi-cross-validation
    m.def("holdout_fraction", &bcv::holdout_fraction, py::arg("gamma"),
          "Returns (rho, bar_gamma) for an aspect ratio gamma = N/n.");
    m.def(
        "partition_sizes",
        [](Index n_vars, Index n_obs) { return bcv::partition_sizes(n_vars, n_obs); },
        py::arg("n_vars"), py::arg("n_obs"),
        "Held-out block sizes (N0, n0) for the given data shape.");
    m.def(
        "predict_heldout",
        [](const Matrix& y01, const Matrix& y10, const Matrix& x11, const Vector& sigma2,
           int k) {
            return bcv::predict_heldout(y01, y10, x11, DiagonalVariances(sigma2), k);
        },
        py::arg("y01"), py::arg("y10"), py::arg("x11hat"), py::arg("sigma2hat"),
        py::arg("k"));
    m.def(
        "variance_guard", [](const Vector& s2) { return bcv::variance_guard(s2); },
        py::arg("sigma2hat"));
    m.def(
        "bcv_select",
        [](const Matrix& y, std::optional<std::vector<int>> ks, int reps,
           std::uint64_t seed, const std::string& estimator, int esa_steps) {
            DataMatrix data = as_data(y);
            bcv::BcvOptions opts;
            opts.reps = reps;
            if (estimator == "esa") {
                opts.estimator = bcv::esa_estimator(esa_steps);
            } else if (estimator == "svd") {
                opts.estimator = bcv::svd_estimator();
            } else {
                throw InvalidInputError("estimator must be 'esa' or 'svd'");
            }
            Rng rng = make_rng(seed);
            std::vector<int> grid =
                ks ? *ks : bcv::default_k_grid(data.n_vars(), data.n_obs());
            return curve_to_dict(bcv::bcv_select(data, grid, rng, opts));
        },
        py::arg("y"), py::arg("ks") = py::none(), py::arg("reps") = 50,
        py::arg("seed") = 0, py::arg("estimator") = "esa", py::arg("esa_steps") = 3,
        "Bi-cross-validation rank selection; returns the PE curve and khat.");

    // baseline selectors
    m.def(
        "pa_select",
        [](const Matrix& y, std::uint64_t seed, int kmax, int n_perm, double quantile,
           bool use_covariance) {
            Rng rng = make_rng(seed);
            return selectors::pa_select(
                as_data(y), rng,
                selector_config(kmax, n_perm, quantile, use_covariance, {}, {}, false));
        },
        py::arg("y"), py::arg("seed") = 0, py::arg("kmax") = 16, py::arg("n_perm") = 99,
        py::arg("quantile") = 0.95, py::arg("use_covariance") = false);
    m.def(
        "ed_select",
        [](const Matrix& y, int kmax, std::optional<double> delta) {
            return selectors::ed_select(
                matops::sample_spectrum(as_data(y)),
                selector_config(kmax, 99, 0.95, false, delta, {}, false));
        },
        py::arg("y"), py::arg("kmax") = 16, py::arg("delta") = py::none());
    m.def(
        "er_select",
        [](const Matrix& y, int kmax, std::optional<int> er_kmax) {
            return selectors::er_select(
                matops::sample_spectrum(as_data(y)),
                selector_config(kmax, 99, 0.95, false, {}, er_kmax, false));
        },
        py::arg("y"), py::arg("kmax") = 16, py::arg("er_kmax") = py::none());
    m.def(
        "ic1_select",
        [](const Matrix& y, int kmax) {
            return selectors::ic1_select(
                as_data(y), selector_config(kmax, 99, 0.95, false, {}, {}, false));
        },
        py::arg("y"), py::arg("kmax") = 16);
    m.def(
        "ne_select",
        [](const Matrix& y, int kmax, bool full_scan) {
            return selectors::ne_select(
                matops::sample_spectrum(as_data(y)),
                selector_config(kmax, 99, 0.95, false, {}, {}, full_scan));
        },
        py::arg("y"), py::arg("kmax") = 16, py::arg("full_scan") = false);

    // simulation
    m.def("thresholds", &simgen::thresholds, py::arg("gamma"), py::arg("sigma_bar2") = 1.0,
          "Detection and estimation thresholds (mu_F, mu_F_star).");
    m.def(
        "generate_dataset",
        [](std::uint64_t seed, int strong, int useful, int harmful, int undetectable,
           Index n_vars, Index n_obs, double var_sigma2) {
            ScenarioSpec spec{strong, useful, harmful, undetectable};
            GeneratedDataset d =
                spec.k0() == 0
                    ? simgen::generate_white_noise(seed, n_vars, n_obs,
                                                   NoiseSpec{var_sigma2})
                    : simgen::generate_dataset(seed, spec, n_vars, n_obs,
                                               NoiseSpec{var_sigma2});
            py::dict out;
            out["y"] = d.y.values();
            out["x"] = d.x;
            out["sigma2"] = d.sigma.sigma2;
            out["u"] = d.u;
            out["v"] = d.v;
            out["d"] = d.d;
            std::vector<std::string> cats;
            for (FactorCategory c : d.categories) cats.emplace_back(to_string(c));
            out["categories"] = cats;
            out["seed"] = d.seed;
            return out;
        },
        py::arg("seed"), py::arg("strong"), py::arg("useful"), py::arg("harmful"),
        py::arg("undetectable"), py::arg("n_vars"), py::arg("n_obs"),
        py::arg("var_sigma2") = 1.0,
        "Synthetic dataset with ground truth; all-zero counts give pure noise.");

    // metrics
    m.def("err_x", &metrics::err_x, py::arg("xhat"), py::arg("x"));
    m.def(
        "true_pe",
        [](const Matrix& x, const Matrix& xhat, const Vector& sigma2) {
            return metrics::true_pe(x, xhat, DiagonalVariances(sigma2));
        },
        py::arg("x"), py::arg("xhat"), py::arg("sigma2"));
    m.def(
        "oracle_rank",
        [](const Matrix& y, const Matrix& x, const std::vector<int>& ks,
           const std::string& estimator, int esa_steps) {
            bcv::Estimator fit = (estimator == "svd") ? bcv::svd_estimator()
                                                      : bcv::esa_estimator(esa_steps);
            metrics::OracleProfile p = metrics::oracle_rank(as_data(y), x, fit, ks);
            return py::make_tuple(p.kstar, p.losses);
        },
        py::arg("y"), py::arg("x"), py::arg("ks"), py::arg("estimator") = "esa",
        py::arg("esa_steps") = 3);
    m.def(
        "survival_curve",
        [](const std::vector<double>& rees, std::optional<std::vector<double>> thresholds) {
            return metrics::survival_curve(
                rees, thresholds ? *thresholds : metrics::default_survival_thresholds());
        },
        py::arg("rees"), py::arg("thresholds") = py::none());
    m.def(
        "early_stopping_profile",
        [](const Matrix& y, const Matrix& x, const std::vector<int>& ks,
           const std::vector<int>& ms) {
            metrics::EarlyStoppingProfile p =
                metrics::early_stopping_profile(as_data(y), x, ks, ms);
            return py::make_tuple(p.ms, p.err_x, p.m_opt);
        },
        py::arg("y"), py::arg("x"), py::arg("ks"), py::arg("ms"));

    m.attr("__version__") = "0.1.0";
}
