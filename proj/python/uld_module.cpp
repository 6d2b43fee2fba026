#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uld/harness.hpp"

namespace py = pybind11;
using namespace uld;

PYBIND11_MODULE(_uld, m) {
    m.doc() = "Unbiased underdamped Langevin estimators";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_ValueError);
    py::register_exception<NonMeetingError>(m, "NonMeetingError", PyExc_RuntimeError);

    py::enum_<ExperimentKind>(m, "ExperimentKind")
        .value("estimate", ExperimentKind::Estimate)
        .value("mse_vs_cost", ExperimentKind::MseVsCost)
        .value("weak_error", ExperimentKind::WeakError)
        .value("increment_moments", ExperimentKind::IncrementMoments)
        .value("meeting_tails", ExperimentKind::MeetingTails)
        .value("sfs_baseline", ExperimentKind::SfsBaseline);

    m.def("parse_kind", &parse_kind, py::arg("name"));
    m.def("kind_name", &kind_name, py::arg("kind"));

    py::class_<DynamicsParams>(m, "DynamicsParams")
        .def(py::init<>())
        .def_readwrite("kappa", &DynamicsParams::kappa)
        .def_readwrite("sigma", &DynamicsParams::sigma)
        .def("satisfies_invariance_relation", &DynamicsParams::satisfies_invariance_relation,
             py::arg("tol") = 1e-12);

    py::class_<EstimatorConfig>(m, "EstimatorConfig")
        .def(py::init<>())
        .def_readwrite("l_star", &EstimatorConfig::l_star)
        .def_readwrite("l_max", &EstimatorConfig::l_max)
        .def_readwrite("level_exponent", &EstimatorConfig::level_exponent)
        .def_readwrite("alpha", &EstimatorConfig::alpha)
        .def_readwrite("k", &EstimatorConfig::k)
        .def_readwrite("strict_k", &EstimatorConfig::strict_k)
        .def_readwrite("M", &EstimatorConfig::M)
        .def_readwrite("tau_cap", &EstimatorConfig::tau_cap)
        .def_readwrite("x0", &EstimatorConfig::x0)
        .def_readwrite("v0", &EstimatorConfig::v0);

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("kind", &ExperimentSpec::kind)
        .def_readwrite("model", &ExperimentSpec::model)
        .def_readwrite("dim", &ExperimentSpec::dim)
        .def_readwrite("mu0", &ExperimentSpec::mu0)
        .def_readwrite("d0", &ExperimentSpec::d0)
        .def_readwrite("t_bar", &ExperimentSpec::t_bar)
        .def_readwrite("gl_gamma", &ExperimentSpec::gl_gamma)
        .def_readwrite("gl_zeta", &ExperimentSpec::gl_zeta)
        .def_readwrite("logistic_n", &ExperimentSpec::logistic_n)
        .def_readwrite("est", &ExperimentSpec::est)
        .def_readwrite("dyn", &ExperimentSpec::dyn)
        .def_readwrite("repetitions", &ExperimentSpec::repetitions)
        .def_readwrite("workers", &ExperimentSpec::workers)
        .def_readwrite("out", &ExperimentSpec::out)
        .def_readwrite("record_wall_time", &ExperimentSpec::record_wall_time)
        .def_readwrite("sweep_l_lo", &ExperimentSpec::sweep_l_lo)
        .def_readwrite("sweep_l_hi", &ExperimentSpec::sweep_l_hi)
        .def_readwrite("ref_level", &ExperimentSpec::ref_level)
        .def_readwrite("horizon", &ExperimentSpec::horizon)
        .def_readwrite("m_grid", &ExperimentSpec::m_grid)
        .def_readwrite("sfs_level", &ExperimentSpec::sfs_level)
        .def_readwrite("sfs_samples", &ExperimentSpec::sfs_samples)
        .def_readwrite("reference", &ExperimentSpec::reference);

    py::class_<ReplicateResult>(m, "ReplicateResult")
        .def_readonly("level", &ReplicateResult::level)
        .def_readonly("value", &ReplicateResult::value)
        .def_readonly("tau", &ReplicateResult::tau)
        .def_readonly("cost", &ReplicateResult::cost)
        .def_readonly("weight", &ReplicateResult::weight);

    py::class_<SlopeFit>(m, "SlopeFit")
        .def_readonly("slope", &SlopeFit::slope)
        .def_readonly("intercept", &SlopeFit::intercept)
        .def_readonly("r_squared", &SlopeFit::r_squared)
        .def("__repr__", [](const SlopeFit& s) {
            return "SlopeFit(slope=" + std::to_string(s.slope) +
                   ", r_squared=" + std::to_string(s.r_squared) + ")";
        });

    py::class_<RunSummary>(m, "RunSummary")
        .def_readonly("rows", &RunSummary::rows)
        .def_readonly("mean", &RunSummary::mean)
        .def_readonly("variance", &RunSummary::variance)
        .def_readonly("stderr", &RunSummary::stderr_mean)
        .def_readonly("mse", &RunSummary::mse)
        .def_readonly("total_cost", &RunSummary::total_cost)
        .def_readonly("gaussian_draws", &RunSummary::gaussian_draws)
        .def_readonly("noise_steps", &RunSummary::noise_steps)
        .def_readonly("n_replicates", &RunSummary::n_replicates)
        .def_readonly("wall_time_s", &RunSummary::wall_time_s)
        .def_readonly("table_header", &RunSummary::table_header)
        .def_readonly("table_rows", &RunSummary::table_rows)
        .def_readonly("has_slope", &RunSummary::has_slope)
        .def_readonly("slope", &RunSummary::slope);

    m.def("fit_slope", &fit_slope, py::arg("points"));
    m.def("run_experiment", &run_experiment, py::arg("spec"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>(),
          "Run the experiment described by the spec with the given master seed.");
}
