#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "thinmem/cli.hpp"
#include "thinmem/harness.hpp"
#include "thinmem/radial1d.hpp"

namespace py = pybind11;
using namespace thinmem;

namespace {

py::array_t<double> field_to_numpy(const LayerField& f) {
    py::array_t<double> out({f.grid.rows(), f.grid.n_ang});
    auto r = out.mutable_unchecked<2>();
    for (int i = 0; i < f.grid.rows(); ++i)
        for (int j = 0; j < f.grid.n_ang; ++j) r(i, j) = f.at(i, j);
    return out;
}

LayerField field_from_numpy(const ReferenceGrid& g, const py::array_t<double>& a) {
    auto r = a.unchecked<2>();
    if (r.shape(0) != g.rows() || r.shape(1) != g.n_ang)
        throw MismatchError("field_from_numpy: array shape does not match the grid");
    LayerField f(g);
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.n_ang; ++j) f.at(i, j) = r(i, j);
    return f;
}

std::vector<double> to_vector(const py::array_t<double>& a) {
    auto r = a.unchecked<1>();
    std::vector<double> v(r.shape(0));
    for (py::ssize_t i = 0; i < r.shape(0); ++i) v[i] = r(i);
    return v;
}

py::array_t<double> to_numpy(const std::vector<double>& v) {
    // Copying constructor with explicit data pointer: portable across
    // pybind11 versions (the bare-count constructor made 0-stride arrays on
    // older releases).
    return py::array_t<double>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())},
                               v.data());
}

RadialProfile profile_from(const py::array_t<double>& lower_nodes,
                           const py::array_t<double>& upper_nodes,
                           const py::array_t<double>& values) {
    RadialGrid1D g;
    g.lower = to_vector(lower_nodes);
    g.upper = to_vector(upper_nodes);
    RadialProfile p(g);
    p.values = to_vector(values);
    if (static_cast<int>(p.values.size()) != g.size())
        throw MismatchError("radial profile: values length != node count");
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Diffusion across a semi-permeable membrane in thin annular layers";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<MismatchError>(m, "MismatchError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

    py::enum_<ScenarioKind>(m, "ScenarioKind")
        .value("TwoThin", ScenarioKind::TwoThin)
        .value("ThinOverThick", ScenarioKind::ThinOverThick)
        .value("ThinOverFast", ScenarioKind::ThinOverFast);
    py::enum_<Side>(m, "Side").value("Lower", Side::Lower).value("Upper", Side::Upper);
    py::enum_<Flavor>(m, "Flavor")
        .value("Physical", Flavor::Physical)
        .value("RescaledTwoThin", Flavor::RescaledTwoThin)
        .value("RescaledThinOverThick", Flavor::RescaledThinOverThick)
        .value("RescaledThinOverFast", Flavor::RescaledThinOverFast)
        .value("FastScale", Flavor::FastScale);
    py::enum_<TimeScheme>(m, "TimeScheme")
        .value("ImplicitEuler", TimeScheme::ImplicitEuler)
        .value("CrankNicolson", TimeScheme::CrankNicolson);
    py::enum_<McInit>(m, "McInit")
        .value("UniformBoth", McInit::UniformBoth)
        .value("UniformUpper", McInit::UniformUpper)
        .value("PointUpper", McInit::PointUpper)
        .value("PointLower", McInit::PointLower);

    py::class_<TransmissionParams>(m, "TransmissionParams")
        .def(py::init<>())
        .def(py::init([](double alpha, double beta, double kappa, double gamma) {
                 TransmissionParams p{alpha, beta, kappa, gamma};
                 p.validate();
                 return p;
             }),
             py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("kappa") = 1.0,
             py::arg("gamma") = 1.0)
        .def_readwrite("alpha", &TransmissionParams::alpha)
        .def_readwrite("beta", &TransmissionParams::beta)
        .def_readwrite("kappa", &TransmissionParams::kappa)
        .def_readwrite("gamma", &TransmissionParams::gamma)
        .def("validate", &TransmissionParams::validate);

    py::class_<Scenario>(m, "Scenario")
        .def_static("two_thin", &Scenario::two_thin, py::arg("one_minus_r"))
        .def_static("thin_over_thick", &Scenario::thin_over_thick, py::arg("R_minus_1"),
                    py::arg("r"))
        .def_static("thin_over_fast", &Scenario::thin_over_fast, py::arg("kappa"),
                    py::arg("r"))
        .def_readonly("kind", &Scenario::kind)
        .def_readonly("thickness", &Scenario::thickness)
        .def_readonly("fixed_inner_radius", &Scenario::fixed_inner_radius);

    py::class_<ReferenceGrid>(m, "ReferenceGrid")
        .def_property_readonly("n_rad_lower",
                               [](const ReferenceGrid& g) { return g.n_rad_lower; })
        .def_property_readonly("n_rad_upper",
                               [](const ReferenceGrid& g) { return g.n_rad_upper; })
        .def_property_readonly("n_ang", [](const ReferenceGrid& g) { return g.n_ang; })
        .def_property_readonly("rows", &ReferenceGrid::rows)
        .def("node", &ReferenceGrid::node)
        .def("angle", &ReferenceGrid::angle)
        .def("membrane_lower_row", &ReferenceGrid::membrane_lower_row)
        .def("membrane_upper_row", &ReferenceGrid::membrane_upper_row);

    py::class_<LayerField>(m, "LayerField")
        .def_property_readonly("grid", [](const LayerField& f) { return f.grid; })
        .def("to_numpy", &field_to_numpy);

    m.def("build_reference_grid", &build_reference_grid, py::arg("scenario"),
          py::arg("n_rad_lower"), py::arg("n_rad_upper"), py::arg("n_ang"));
    m.def("field_from_numpy", &field_from_numpy, py::arg("grid"), py::arg("values"));
    m.def("physical_radius", &physical_radius, py::arg("scenario"), py::arg("gamma"),
          py::arg("varrho"), py::arg("side"));
    m.def("write_field_csv", &write_field_csv);
    m.def("read_field_csv", &read_field_csv);

    py::class_<LimitState>(m, "LimitState")
        .def_static("two_circles",
                    [](const py::array_t<double>& gp, const py::array_t<double>& gm) {
                        return LimitState::two_circles(to_vector(gp), to_vector(gm));
                    })
        .def_static("circle_annulus",
                    [](const py::array_t<double>& gp, const py::array_t<double>& um) {
                        return LimitState::circle_annulus(to_vector(gp), to_vector(um));
                    })
        .def_static("circle_point",
                    [](const py::array_t<double>& gp, double k) {
                        return LimitState::circle_point(to_vector(gp), k);
                    })
        .def_property_readonly("scenario", [](const LimitState& s) { return s.scenario; })
        .def_property_readonly("g_plus", [](const LimitState& s) { return to_numpy(s.g_plus); })
        .def_property_readonly("g_minus",
                               [](const LimitState& s) { return to_numpy(s.g_minus); })
        .def_property_readonly("u_minus",
                               [](const LimitState& s) { return to_numpy(s.u_minus); })
        .def_property_readonly("k_minus", [](const LimitState& s) { return s.k_minus; });

    m.def("project", &project, py::arg("scenario"), py::arg("field"));
    m.def("lift_limit_state", &lift_limit_state, py::arg("state"), py::arg("grid"));

    py::class_<CorrectorProfile>(m, "CorrectorProfile")
        .def_property_readonly("psi", [](const CorrectorProfile& c) { return to_numpy(c.psi); })
        .def_property_readonly("dpsi",
                               [](const CorrectorProfile& c) { return to_numpy(c.dpsi); })
        .def_property_readonly("d2psi",
                               [](const CorrectorProfile& c) { return to_numpy(c.d2psi); })
        .def_readonly("dpsi_membrane_upper", &CorrectorProfile::dpsi_membrane_upper)
        .def_readonly("dpsi_membrane_lower", &CorrectorProfile::dpsi_membrane_lower)
        .def_readonly("dpsi_outer_lower", &CorrectorProfile::dpsi_outer_lower)
        .def_readonly("dpsi_outer_upper", &CorrectorProfile::dpsi_outer_upper);

    m.def("build_corrector", &build_corrector);
    m.def("corrector_lift", &corrector_lift, py::arg("scenario"), py::arg("state"),
          py::arg("thickness"), py::arg("params"), py::arg("grid"),
          py::arg("enforce_rows") = true);

    py::class_<DiscreteGenerator>(m, "DiscreteGenerator")
        .def_property_readonly("flavor", [](const DiscreteGenerator& g) { return g.flavor; })
        .def_property_readonly("n_modes", &DiscreteGenerator::n_modes)
        .def_property_readonly("s_lower", [](const DiscreteGenerator& g) { return g.s_lower; })
        .def_property_readonly("s_upper",
                               [](const DiscreteGenerator& g) { return g.s_upper; });

    m.def("assemble_generator", &assemble_generator, py::arg("scenario"), py::arg("flavor"),
          py::arg("params"), py::arg("grid"));
    m.def("assemble_fast_operator", &assemble_fast_operator);
    m.def(
        "apply_generator",
        [](const DiscreteGenerator& gen, const LayerField& u, bool raw, double tau_bc) {
            return apply_generator(gen, u, {raw, tau_bc});
        },
        py::arg("generator"), py::arg("field"), py::arg("raw") = false,
        py::arg("tau_bc") = -1.0);
    m.def("resolvent_solve", &resolvent_solve, py::arg("generator"), py::arg("lam"),
          py::arg("field"));
    m.def("evolve", &evolve, py::arg("generator"), py::arg("field"), py::arg("t"),
          py::arg("dt"), py::arg("scheme") = TimeScheme::ImplicitEuler);

    py::class_<LimitGenerator>(m, "LimitGenerator")
        .def_property_readonly("paper_literal",
                               [](const LimitGenerator& g) { return g.paper_literal; });
    m.def("assemble_limit_generator", &assemble_limit_generator, py::arg("scenario"),
          py::arg("params"), py::arg("grid"), py::arg("paper_literal") = false);
    m.def("apply_limit_generator", &apply_limit_generator);
    m.def("evolve_limit", &evolve_limit, py::arg("generator"), py::arg("state"),
          py::arg("t"), py::arg("dt"), py::arg("scheme") = TimeScheme::ImplicitEuler);

    m.def(
        "matrix_exponential_2x2",
        [](double a, double b, double t, std::pair<double, double> v0) {
            auto r = matrix_exponential_2x2(a, b, t, {v0.first, v0.second});
            return std::make_pair(r[0], r[1]);
        },
        py::arg("a"), py::arg("b"), py::arg("t"), py::arg("v0"));

    m.def(
        "kurtz_fast_residual",
        [](ScenarioKind kind, double inner_radius, const TransmissionParams& p,
           const ReferenceGrid& grid, const LayerField& u,
           const std::vector<double>& thicknesses) {
            auto rows = kurtz_fast_residual(kind, inner_radius, p, grid, u, thicknesses);
            std::vector<std::pair<double, double>> out;
            for (const auto& r : rows) out.emplace_back(r.thickness, r.residual);
            return out;
        });

    m.def(
        "run_convergence_study",
        [](ScenarioKind kind, const TransmissionParams& p, const LayerField& u0, double t,
           const std::vector<double>& thicknesses, double dt, TimeScheme scheme) {
            auto rows = run_convergence_study(kind, p, u0, t, thicknesses, dt, scheme);
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& r : rows) out.emplace_back(r.thickness, r.error, r.ratio);
            return out;
        },
        py::arg("scenario"), py::arg("params"), py::arg("u0"), py::arg("t"),
        py::arg("thicknesses"), py::arg("dt"),
        py::arg("scheme") = TimeScheme::ImplicitEuler);

    // 1D oracles
    m.def(
        "resolvent_closed_form",
        [](double lam, const py::array_t<double>& lower_nodes,
           const py::array_t<double>& upper_nodes, const py::array_t<double>& values,
           const TransmissionParams& p) {
            RadialProfile g = profile_from(lower_nodes, upper_nodes, values);
            return to_numpy(resolvent_closed_form(lam, g, p).values);
        },
        py::arg("lam"), py::arg("lower_nodes"), py::arg("upper_nodes"), py::arg("values"),
        py::arg("params"));
    m.def(
        "log_conjugate_resolvent",
        [](double lam, const py::array_t<double>& lower_nodes,
           const py::array_t<double>& upper_nodes, const py::array_t<double>& values,
           const TransmissionParams& p) {
            RadialProfile g = profile_from(lower_nodes, upper_nodes, values);
            return to_numpy(log_conjugate_resolvent(lam, g, p).values);
        });
    m.def(
        "transmission_determinant",
        [](double lam, const TransmissionParams& p, double a, double b) {
            return transmission_determinant(lam, p, {a, b});
        },
        py::arg("lam"), py::arg("params"), py::arg("a"), py::arg("b"));

    // particle simulations
    py::class_<EmpiricalSummary>(m, "EmpiricalSummary")
        .def_readonly("seed", &EmpiricalSummary::seed)
        .def_readonly("n_particles", &EmpiricalSummary::n_particles)
        .def_readonly("n_bins", &EmpiricalSummary::n_bins)
        .def_property_readonly("times",
                               [](const EmpiricalSummary& s) { return to_numpy(s.times); })
        .def_property_readonly("upper_counts",
                               [](const EmpiricalSummary& s) {
                                   std::vector<double> v(s.upper_counts.begin(),
                                                         s.upper_counts.end());
                                   return to_numpy(v);
                               })
        .def_property_readonly("hist_upper",
                               [](const EmpiricalSummary& s) {
                                   std::vector<double> v(s.hist_upper.begin(),
                                                         s.hist_upper.end());
                                   return to_numpy(v);
                               })
        .def_property_readonly("hist_lower",
                               [](const EmpiricalSummary& s) {
                                   std::vector<double> v(s.hist_lower.begin(),
                                                         s.hist_lower.end());
                                   return to_numpy(v);
                               })
        .def("frac_upper", &EmpiricalSummary::frac_upper);

    py::class_<McOptions>(m, "McOptions")
        .def(py::init<>())
        .def_readwrite("n_bins", &McOptions::n_bins)
        .def_readwrite("record_dt", &McOptions::record_dt)
        .def_readwrite("mirror", &McOptions::mirror)
        .def_readwrite("threads", &McOptions::threads)
        .def_readwrite("init", &McOptions::init)
        .def_readwrite("init_rho", &McOptions::init_rho)
        .def_readwrite("init_phi", &McOptions::init_phi)
        .def_readwrite("crossing_cal_upper", &McOptions::crossing_cal_upper)
        .def_readwrite("crossing_cal_lower", &McOptions::crossing_cal_lower);

    m.def("simulate_membrane_bm", &simulate_membrane_bm, py::arg("params"), py::arg("r"),
          py::arg("R"), py::arg("n_particles"), py::arg("t_end"), py::arg("dt"),
          py::arg("seed"), py::arg("options") = McOptions{});
    m.def("simulate_limit_jump_diffusion", &simulate_limit_jump_diffusion,
          py::arg("scenario"), py::arg("params"), py::arg("n_particles"), py::arg("t_end"),
          py::arg("dt"), py::arg("seed"), py::arg("options") = McOptions{});

    m.def("run_cli", &run_cli, "Run the command-line interface with the given arguments");
    m.attr("__version__") = kVersion;
}
