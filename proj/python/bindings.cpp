#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "muskat/errors.hpp"
#include "muskat/evolution.hpp"
#include "muskat/fields.hpp"
#include "muskat/io.hpp"
#include "muskat/kernels.hpp"
#include "muskat/omega.hpp"
#include "muskat/stability.hpp"
#include "muskat/verify.hpp"

namespace py = pybind11;
using namespace muskat;

namespace {

// Arrays cross the boundary as plain samples; the grid is rebuilt from the
// window half length and the sample count.
GridFunction on_grid(double L, const Vector& v) { return GridFunction(Grid(L, static_cast<std::size_t>(v.size())), v); }

Stepper parse_stepper(const std::string& s) {
    if (s == "rk_adaptive") return Stepper::rk_adaptive;
    if (s == "imex") return Stepper::imex;
    throw InvalidConfiguration("stepper must be rk_adaptive or imex, got '" + s + "'");
}

SolverMethod parse_method(const std::string& s) {
    if (s == "direct") return SolverMethod::direct;
    if (s == "neumann") return SolverMethod::neumann;
    throw InvalidConfiguration("method must be direct or neumann, got '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Boundary-integral Muskat solver";
    m.attr("__version__") = version();

    auto base = py::register_exception<Error>(m, "MuskatError", PyExc_RuntimeError);
    py::register_exception<InvalidConfiguration>(m, "InvalidConfiguration", base.ptr());
    py::register_exception<GridMismatch>(m, "GridMismatch", base.ptr());
    py::register_exception<DecayCheckFailed>(m, "DecayCheckFailed", base.ptr());
    py::register_exception<NonFinite>(m, "NonFinite", base.ptr());
    py::register_exception<DegenerateOperator>(m, "DegenerateOperator", base.ptr());
    py::register_exception<DtUnderflow>(m, "DtUnderflow", base.ptr());
    py::register_exception<RTBreakdown>(m, "RTBreakdown", base.ptr());
    py::register_exception<PointTooClose>(m, "PointTooClose", base.ptr());
    py::register_exception<PathCrossesInterface>(m, "PathCrossesInterface", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    py::class_<FluidParams>(m, "FluidParams")
        .def(py::init<>())
        .def_readwrite("mu_minus", &FluidParams::mu_minus)
        .def_readwrite("mu_plus", &FluidParams::mu_plus)
        .def_readwrite("rho_minus", &FluidParams::rho_minus)
        .def_readwrite("rho_plus", &FluidParams::rho_plus)
        .def_readwrite("g", &FluidParams::g)
        .def_readwrite("k", &FluidParams::k)
        .def_readwrite("sigma", &FluidParams::sigma)
        .def_readwrite("V", &FluidParams::V)
        .def_static("normalized", &FluidParams::normalized, py::arg("a_mu"), py::arg("theta"), py::arg("sigma") = 1.0)
        .def("validate", &FluidParams::validate);

    py::class_<DerivedConstants>(m, "DerivedConstants")
        .def_readonly("a_mu", &DerivedConstants::a_mu)
        .def_readonly("b_mu", &DerivedConstants::b_mu)
        .def_readonly("theta", &DerivedConstants::theta)
        .def_readonly("c_rho_mu", &DerivedConstants::c_rho_mu);
    m.def("derive_constants", &derive_constants);

    m.def("nodes", [](double L, std::size_t n) { return Grid(L, n).nodes(); }, py::arg("L"), py::arg("N"));
    m.def("derivative", [](double L, const Vector& u, int order) { return spectral_derivative(on_grid(L, u), order).values; },
          py::arg("L"), py::arg("u"), py::arg("order") = 1);
    m.def("hilbert", [](double L, const Vector& u) { return hilbert_transform(on_grid(L, u)).values; });

    m.def("apply_A", [](double L, const Vector& f, const Vector& w) { return apply_A(on_grid(L, f), on_grid(L, w)).values; });
    m.def("apply_B", [](double L, const Vector& f, const Vector& w) { return apply_B(on_grid(L, f), on_grid(L, w)).values; });
    m.def("apply_A_star",
          [](double L, const Vector& f, const Vector& phi) { return apply_A_star(on_grid(L, f), on_grid(L, phi)).values; });

    m.def(
        "solve_omega",
        [](double L, const Vector& f, const FluidParams& p, const std::string& method) {
            const GridFunction gf = on_grid(L, f);
            const DerivedConstants c = derive_constants(p);
            const GridFunction rhs =
                p.sigma > 0.0 ? rhs_tension(gf, gf, p) : rhs_no_tension(gf, c);
            const VortexSheet s = solve_omega(gf, rhs, c, {parse_method(method)});
            return py::make_tuple(s.omega.values, s.residual_norm);
        },
        py::arg("L"), py::arg("f"), py::arg("params"), py::arg("method") = "direct",
        "Sheet strength and residual norm for the interface f.");

    m.def("dfdt", [](double L, const Vector& f, const FluidParams& p) { return rhs_evolution(on_grid(L, f), p).dfdt.values; });

    m.def(
        "evaluate_rt",
        [](double L, const Vector& f, const FluidParams& p) {
            const RTReport r = evaluate_rt(on_grid(L, f), derive_constants(p));
            py::dict d;
            d["a_rt"] = r.a_rt.values;
            d["infimum"] = r.infimum;
            d["in_O"] = r.in_O;
            d["tolerance"] = r.tolerance;
            return d;
        },
        py::arg("L"), py::arg("f"), py::arg("params"));

    m.def("dispersion_rate", &dispersion_rate, py::arg("k"), py::arg("sigma_on"), py::arg("params"));

    m.def(
        "simulate",
        [](double L, const Vector& f0, const FluidParams& p, double t_end, const std::string& stepper, double rel_tol,
           std::size_t snapshot_every, bool enforce_rt) {
            StepControls ctl;
            ctl.stepper = parse_stepper(stepper);
            ctl.rel_tol = rel_tol;
            ctl.enforce_rt = enforce_rt;
            Trajectory tr;
            {
                py::gil_scoped_release release;
                tr = simulate(on_grid(L, f0), p, t_end, ctl, snapshot_every);
            }
            py::list times, states;
            for (const Snapshot& s : tr.snapshots) {
                times.append(s.t);
                states.append(s.f.values);
            }
            py::dict d;
            d["t"] = times;
            d["f"] = states;
            d["termination"] = to_string(tr.cause);
            d["message"] = tr.message;
            d["steps"] = tr.accepted_steps;
            return d;
        },
        py::arg("L"), py::arg("f0"), py::arg("params"), py::arg("t_end"), py::arg("stepper") = "rk_adaptive",
        py::arg("rel_tol") = 1e-8, py::arg("snapshot_every") = 10, py::arg("enforce_rt") = true);

    m.def(
        "biot_savart",
        [](double L, const Vector& f, const Vector& w, const Eigen::MatrixX2d& pts) {
            std::vector<Point> ps;
            for (Eigen::Index i = 0; i < pts.rows(); ++i) ps.push_back({pts(i, 0), pts(i, 1)});
            const auto samples = biot_savart(on_grid(L, f), on_grid(L, w), ps);
            Eigen::MatrixX2d v(pts.rows(), 2);
            for (Eigen::Index i = 0; i < pts.rows(); ++i) v.row(i) << samples[i].v1, samples[i].v2;
            return v;
        },
        py::arg("L"), py::arg("f"), py::arg("omega"), py::arg("points"), "Velocity (v1, v2) at each row of points.");

    m.def("run_suite_json", [](const std::string& name) { return to_json(run_suite(name)).dump(); });
    m.def("run_config_json", [](const std::string& config, const std::string& base_dir) {
        return run_simulation(parse_config(json::parse(config), base_dir)).manifest_json.dump();
    });
}
