#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "entrain/diagnostics.hpp"
#include "entrain/goe.hpp"
#include "entrain/models.hpp"
#include "entrain/sensitivity.hpp"

namespace py = pybind11;
using namespace entrain;

namespace {

ControlInterp interp_from(const std::string& s) {
    if (s == "linear") return ControlInterp::LinearPeriodic;
    if (s == "trig") return ControlInterp::Trigonometric;
    throw std::invalid_argument("interp must be 'linear' or 'trig'");
}

SolverOptions make_options(double newton_tol, int max_iter, double ode_rtol,
                           double ode_atol, int grid_k) {
    SolverOptions o;
    o.newton_tol = newton_tol;
    o.max_iter = max_iter;
    o.ode_rtol = ode_rtol;
    o.ode_atol = ode_atol;
    o.grid_k = grid_k;
    return o;
}

MeasureKind measure_from(const std::string& kind, const std::optional<Vector>& weights) {
    if (kind == "l1") return MeasureKind::l1();
    if (kind == "linf") return MeasureKind::linf();
    if (kind == "weighted-l1") {
        if (!weights) throw std::invalid_argument("weighted-l1 needs weights");
        return MeasureKind::weighted_l1(*weights);
    }
    throw std::invalid_argument("kind must be l1, linf or weighted-l1");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Entrained periodic solutions and gain of entrainment for bilinear systems";

    py::register_exception<NoConvergence>(m, "NoConvergenceError", PyExc_RuntimeError);
    py::register_exception<SingularMonodromy>(m, "SingularMonodromyError", PyExc_RuntimeError);
    py::register_exception<InadmissibleControl>(m, "InadmissibleControlError", PyExc_ValueError);
    py::register_exception<NotIrreducible>(m, "NotIrreducibleError", PyExc_ValueError);
    py::register_exception<NotHurwitz>(m, "NotHurwitzError", PyExc_ValueError);

    py::class_<PeriodicControl>(m, "PeriodicControl")
        .def(py::init([](double period, const Matrix& samples, const std::string& interp) {
                 return PeriodicControl(period, samples, interp_from(interp));
             }),
             py::arg("period"), py::arg("samples"), py::arg("interp") = "linear")
        .def_static("constant", &PeriodicControl::constant, py::arg("period"),
                    py::arg("value"), py::arg("k") = 256)
        .def_static(
            "harmonic",
            [](double period, const Vector& offset, const Vector& amplitude, double omega,
               double phase, int k) {
                return PeriodicControl::harmonic(period, offset, amplitude, omega, phase, k);
            },
            py::arg("period"), py::arg("offset"), py::arg("amplitude"), py::arg("omega"),
            py::arg("phase") = 0.0, py::arg("k") = 256)
        .def("__call__", &PeriodicControl::eval, py::arg("t"))
        .def_property_readonly("period", &PeriodicControl::period)
        .def_property_readonly("channels", &PeriodicControl::channels)
        .def_property_readonly("samples", &PeriodicControl::samples)
        .def("norm", &PeriodicControl::norm)
        .def("mean", &PeriodicControl::mean)
        .def("zero_mean", &PeriodicControl::zero_mean)
        .def("scaled", &PeriodicControl::scaled, py::arg("a"))
        .def("plus", &PeriodicControl::plus, py::arg("other"), py::arg("weight") = 1.0)
        .def("resampled", &PeriodicControl::resampled, py::arg("k"))
        .def("with_prefix_channel", &PeriodicControl::with_prefix_channel,
             py::arg("value") = 1.0);

    py::class_<BilinearSystem>(m, "BilinearSystem")
        .def_readonly("n", &BilinearSystem::n)
        .def_readonly("m", &BilinearSystem::m)
        .def_readonly("name", &BilinearSystem::name)
        .def("rhs", &BilinearSystem::rhs, py::arg("u"), py::arg("x"))
        .def("output", [](const BilinearSystem& s, const Vector& u, const Vector& x) {
            return s.h(u, x);
        });

    py::class_<MasterSystem>(m, "MasterSystem")
        .def_readonly("system", &MasterSystem::sys)
        .def_readonly("configs", &MasterSystem::configs)
        .def_readonly("basis", &MasterSystem::basis)
        .def("to_reduced", &MasterSystem::to_reduced, py::arg("z"))
        .def("to_probability", &MasterSystem::to_probability, py::arg("x"))
        .def("transition_matrix", &MasterSystem::transition_matrix, py::arg("u"))
        .def("channel", &MasterSystem::channel, py::arg("i"), py::arg("j"));

    m.def(
        "build_rfm", [](int n, double c) { return build_rfm({n, c}); }, py::arg("n"),
        py::arg("c") = 1e-3);
    m.def(
        "build_master",
        [](int n, std::optional<std::vector<std::pair<int, int>>> transitions, double c) {
            MasterChainSpec spec = MasterChainSpec::complete(n, c);
            if (transitions) spec.transitions = *transitions;
            return build_master(spec);
        },
        py::arg("n"), py::arg("transitions") = py::none(), py::arg("c") = 1e-3);
    m.def("build_example_linear", &build_example_linear, py::arg("A"), py::arg("b"),
          py::arg("c"));
    m.def("build_example_pavlov", &build_example_pavlov);
    m.def("build_example_scalar", &build_example_scalar);

    py::class_<PeriodicSolution>(m, "PeriodicSolution")
        .def_readonly("gamma0", &PeriodicSolution::gamma0)
        .def_readonly("residual", &PeriodicSolution::residual)
        .def_property_readonly("period", &PeriodicSolution::period)
        .def_property_readonly("times",
                               [](const PeriodicSolution& s) { return s.trajectory.grid.nodes; })
        .def_property_readonly("states",
                               [](const PeriodicSolution& s) {
                                   Matrix out(s.trajectory.states.size(), s.gamma0.size());
                                   for (std::size_t i = 0; i < s.trajectory.states.size(); ++i)
                                       out.row(i) = s.trajectory.states[i].transpose();
                                   return out;
                               })
        .def_property_readonly(
            "monodromy_eigenvalues",
            [](const PeriodicSolution& s) { return s.monodromy.eigenvalues; })
        .def_property_readonly(
            "spectral_radius",
            [](const PeriodicSolution& s) { return s.monodromy.spectral_radius; })
        .def_property_readonly(
            "nondegenerate",
            [](const PeriodicSolution& s) { return s.monodromy.nondegenerate; });

    m.def(
        "solve_periodic",
        [](const BilinearSystem& sys, const PeriodicControl& u,
           std::optional<Vector> x_init, double newton_tol, int max_iter, double ode_rtol,
           double ode_atol, int grid_k) {
            const SolverOptions o = make_options(newton_tol, max_iter, ode_rtol, ode_atol, grid_k);
            return x_init ? solve_periodic(sys, u, *x_init, o) : solve_periodic(sys, u, o);
        },
        py::arg("system"), py::arg("control"), py::arg("x_init") = py::none(),
        py::arg("newton_tol") = 1e-12, py::arg("max_iter") = 60, py::arg("ode_rtol") = 1e-10,
        py::arg("ode_atol") = 1e-12, py::arg("grid_k") = 256);

    py::class_<GoeReport>(m, "GoeReport")
        .def_readonly("ybar_base", &GoeReport::ybar_base)
        .def_readonly("ybar_pert", &GoeReport::ybar_pert)
        .def_readonly("goe", &GoeReport::goe)
        .def_readonly("first_order_prediction", &GoeReport::first_order_prediction)
        .def_readonly("residual", &GoeReport::residual)
        .def_readonly("du_norm", &GoeReport::du_norm);

    m.def("average_output", &average_output, py::arg("system"), py::arg("solution"));
    m.def(
        "goe_exact",
        [](const BilinearSystem& sys, const PeriodicControl& u, const PeriodicControl& du) {
            return goe_exact(sys, u, du);
        },
        py::arg("system"), py::arg("control"), py::arg("perturbation"));
    m.def(
        "goe_first_order",
        [](const BilinearSystem& sys, const PeriodicSolution& sol, const PeriodicControl& du) {
            return goe_first_order(sys, sol, du);
        },
        py::arg("system"), py::arg("solution"), py::arg("perturbation"));
    m.def(
        "goe_kernel",
        [](const BilinearSystem& sys, const PeriodicSolution& sol) {
            KernelSamples ker = goe_kernel(sys, sol);
            Matrix K(ker.values.size(), ker.values.front().size());
            for (std::size_t i = 0; i < ker.values.size(); ++i) K.row(i) = ker.values[i];
            return std::make_pair(ker.grid.nodes, K);
        },
        py::arg("system"), py::arg("solution"));
    m.def(
        "optimal_direction_sign",
        [](const BilinearSystem& sys, const PeriodicSolution& sol) {
            return optimal_direction_sign(goe_kernel(sys, sol));
        },
        py::arg("system"), py::arg("solution"));
    m.def("optimal_constant_direction", &optimal_constant_direction, py::arg("system"),
          py::arg("vbar"), py::arg("equilibrium"));
    m.def("project_zero_mean", &project_zero_mean, py::arg("perturbation"));

    m.def(
        "dgamma_apply",
        [](const BilinearSystem& sys, const PeriodicSolution& sol, const PeriodicControl& du) {
            return dgamma_apply(sys, sol, du).dgamma0;
        },
        py::arg("system"), py::arg("solution"), py::arg("perturbation"));
    m.def("dgamma_constant", &dgamma_constant, py::arg("system"), py::arg("equilibrium"),
          py::arg("vbar"), py::arg("perturbation"), py::arg("quad_samples") = 1024);

    m.def(
        "matrix_measure",
        [](const Matrix& A, const std::string& kind, std::optional<Vector> weights) {
            return matrix_measure(A, measure_from(kind, weights));
        },
        py::arg("A"), py::arg("kind") = "l1", py::arg("weights") = py::none());
    m.def(
        "contraction_scan",
        [](const BilinearSystem& sys, const PeriodicSolution& sol, const std::string& kind,
           std::optional<Vector> weights) {
            return contraction_scan(sys, sol, measure_from(kind, weights));
        },
        py::arg("system"), py::arg("solution"), py::arg("kind") = "l1",
        py::arg("weights") = py::none());
}
