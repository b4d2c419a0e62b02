#include "vexp/audit.hpp"
#include "vexp/discrete_operator.hpp"
#include "vexp/energy.hpp"
#include "vexp/modular.hpp"
#include "vexp/potential.hpp"
#include "vexp/scenario.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace vexp;

namespace {

py::array_t<double> to_array(std::span<const double> v) { return py::array_t<double>(v.size(), v.data()); }

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a)
{
    if (a.ndim() != 1) {
        throw py::value_error("expected a one-dimensional array");
    }
    return {a.data(), a.data() + a.size()};
}

py::dict bundle_dict(const NormBundle& b)
{
    py::dict d;
    d["modular"] = b.modular;
    d["luxemburg"] = b.luxemburg;
    d["phi"] = b.phi;
    d["sobolev"] = b.sobolev;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Variable-exponent norms, operators and a nonsmooth mountain-pass solver";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
        .def(py::init([](int dimension, std::vector<std::pair<double, double>> bounds, std::vector<std::size_t> nodes) {
                 return std::const_pointer_cast<Grid>(build_grid(dimension, std::move(bounds), std::move(nodes)));
             }),
             py::arg("dimension"), py::arg("bounds"), py::arg("nodes"))
        .def_property_readonly("dimension", &Grid::dimension)
        .def_property_readonly("node_count", &Grid::node_count)
        .def_property_readonly("interior_count", &Grid::interior_count)
        .def("coordinates", [](const Grid& g, int axis) {
            std::vector<double> x(g.node_count());
            for (std::size_t k = 0; k < x.size(); ++k) {
                x[k] = g.coordinate(k, axis);
            }
            return to_array(x);
        });

    py::class_<ExponentField>(m, "ExponentField")
        .def(py::init([](const std::shared_ptr<Grid>& g, const py::array_t<double>& v) {
            return ExponentField(g, from_array(v));
        }))
        .def_static("preset", [](const std::shared_ptr<Grid>& g, const std::string& s) {
            return exponent_from_preset(g, s);
        })
        .def_property_readonly("values", [](const ExponentField& p) { return to_array(p.values()); })
        .def_property_readonly("p_minus", &ExponentField::p_minus)
        .def_property_readonly("p_plus", &ExponentField::p_plus);

    py::class_<GridFunction>(m, "GridFunction")
        .def(py::init([](const std::shared_ptr<Grid>& g, const py::array_t<double>& v) {
            return GridFunction(g, from_array(v));
        }))
        .def_static("preset", [](const std::shared_ptr<Grid>& g, const std::string& s) {
            return function_from_preset(g, s);
        })
        .def_property_readonly("values", [](const GridFunction& u) { return to_array(u.values()); })
        .def("zero_trace", &GridFunction::zero_trace);

    m.def("modular", &modular);
    m.def("luxemburg_norm", &luxemburg_norm);
    m.def("phi_luxemburg_norm", &phi_luxemburg_norm);
    m.def("sobolev_norm", &sobolev_norm);
    m.def("norm_bundle", [](const GridFunction& u, const ExponentField& p) { return bundle_dict(norm_bundle(u, p)); });
    m.def("holder_pairing", [](const GridFunction& u, const GridFunction& v, const ExponentField& p) {
        const HolderPairing h = holder_pairing(u, v, p);
        return py::make_tuple(h.lhs, h.rhs);
    });

    m.def("apply_A", [](const GridFunction& u, const ExponentField& p) { return to_array(apply_A(u, p).values()); });
    m.def("energy_J", &energy_J);
    m.def(
        "estimate_lambda_star",
        [](const ExponentField& p, int restarts, std::uint64_t seed, int max_iters) {
            const LambdaStarEstimate e = estimate_lambda_star(p, {restarts, seed, max_iters});
            py::dict d;
            d["value"] = e.value;
            d["converged"] = e.converged;
            d["iterations"] = e.iterations;
            d["per_start"] = e.per_start;
            d["witness"] = to_array(e.witness.values());
            return d;
        },
        py::arg("p"), py::arg("restarts") = 4, py::arg("seed") = 1, py::arg("max_iters") = 2000);

    py::class_<PiecewisePotential>(m, "Potential")
        .def_property_readonly("name", &PiecewisePotential::name)
        .def_property_readonly("breakpoints",
                               [](const PiecewisePotential& j) {
                                   return std::vector<double>(j.breakpoints().begin(), j.breakpoints().end());
                               })
        .def("value", [](const PiecewisePotential& j, double p, double t) { return j.value(Site{p}, t); })
        .def("clarke_interval", [](const PiecewisePotential& j, double p, double t) {
            const ClarkeInterval c = clarke_interval(j, Site{p}, t);
            return py::make_tuple(c.lo, c.hi);
        });
    m.def("make_j1", &make_j1, py::arg("mu"), py::arg("sigma"), py::arg("p"), py::arg("q_plus"));
    m.def("make_j2", &make_j2, py::arg("mu"), py::arg("p"), py::arg("q_plus"));
    m.def("make_quartic", &make_quartic, py::arg("mu"));

    m.def("eval_R", [](const ExponentField& p, double lambda, const PiecewisePotential& j, const GridFunction& u) {
        return eval_R(EnergyModel(p, lambda, j), u);
    });

    m.def(
        "run_scenario",
        [](const std::string& config, const std::string& command) {
            const ScenarioOutcome o = run_scenario(parse_config(config), parse_command(command));
            return py::make_tuple(o.exit_code, o.summary, o.csv);
        },
        py::arg("config"), py::arg("command"), "Runs a JSON scenario; returns (exit_code, summary_json, csv).");
}
