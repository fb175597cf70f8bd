#include "heatcons/analysis.hpp"
#include "heatcons/config.hpp"
#include "heatcons/report.hpp"

#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace heatcons;

namespace {

using release = py::call_guard<py::gil_scoped_release>;

template <class E>
py::object string_enum(py::module_& m, const char* name, std::initializer_list<std::pair<const char*, E>> values) {
    py::enum_<E> e(m, name);
    for (const auto& [n, v] : values) e.value(n, v);
    py::setattr(e, "__str__", py::cpp_function([](E v) { return std::string(to_string(v)); }, py::is_method(e)));
    return e;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Conservation tests for heat semigroups on weighted model manifolds";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());
    auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", validation.ptr());
    py::register_exception<NumericsError>(m, "NumericsError", base.ptr());

    string_enum<Verdict>(m, "Verdict",
                         {{"conservative_generalized", Verdict::conservative_generalized},
                          {"not_conservative", Verdict::not_conservative},
                          {"inconclusive", Verdict::inconclusive}});
    string_enum<TailClass>(m, "TailClass",
                           {{"divergent", TailClass::divergent},
                            {"convergent", TailClass::convergent},
                            {"inconclusive", TailClass::inconclusive}});
    string_enum<PotentialStrategy>(m, "PotentialStrategy",
                                   {{"corollary_radial", PotentialStrategy::corollary_radial},
                                    {"sturm_convex", PotentialStrategy::sturm_convex}});
    string_enum<Weight>(m, "Weight",
                        {{"rho", Weight::rho}, {"rho_plus_V", Weight::rho_plus_V}, {"potential_only", Weight::potential_only}});

    py::class_<RadialExpr>(m, "RadialExpr")
        .def(py::init([](const std::string& text) { return RadialExpr::parse(text); }), py::arg("text"))
        .def_static("constant", &RadialExpr::constant)
        .def_static("variable", &RadialExpr::variable)
        .def_static("piecewise", &RadialExpr::piecewise, py::arg("threshold"), py::arg("left"), py::arg("right"))
        .def("__call__", &RadialExpr::eval, py::arg("r"))
        .def("eval", &RadialExpr::eval, py::arg("r"))
        .def("log_eval", &RadialExpr::log_eval, py::arg("r"))
        .def("derivative", &RadialExpr::derivative)
        .def("is_constant", &RadialExpr::is_constant)
        .def("node_count", &RadialExpr::node_count)
        .def("__str__", &RadialExpr::to_string)
        .def("__repr__", [](const RadialExpr& e) { return "RadialExpr(\"" + e.to_string() + "\")"; })
        .def("__eq__", &RadialExpr::structurally_equal)
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(py::self / py::self);

    py::class_<ManifoldSpec>(m, "ManifoldSpec")
        .def(py::init([](int dimension, const std::string& sigma, const std::string& rho, const std::string& potential) {
                 return ManifoldSpec::from_strings(dimension, sigma, rho, potential);
             }),
             py::arg("dimension") = 2, py::arg("sigma") = "r", py::arg("rho") = "1", py::arg("potential") = "0")
        .def_readonly("dimension", &ManifoldSpec::dimension)
        .def_readonly("sigma", &ManifoldSpec::sigma)
        .def_readonly("rho", &ManifoldSpec::rho)
        .def_readonly("potential", &ManifoldSpec::potential)
        .def("log_surface", &ManifoldSpec::log_surface, py::arg("r"))
        .def("potential_ratio", &ManifoldSpec::potential_ratio, py::arg("r"))
        .def("time_changed", &ManifoldSpec::time_changed)
        .def("with_potential",
             [](const ManifoldSpec& s, const std::string& v) { return s.with_potential(RadialExpr::parse(v)); })
        .def("with_potential", &ManifoldSpec::with_potential)
        .def("digest", &ManifoldSpec::digest)
        .def("__repr__", [](const ManifoldSpec& s) { return "ManifoldSpec(" + s.digest() + ")"; });

    m.def("validate", [](const ManifoldSpec& s) {
        std::vector<std::tuple<double, std::string, double>> out;
        for (const auto& v : validate(s)) out.emplace_back(v.r, v.quantity, v.value);
        return out;
    });
    m.def("volume", &volume, py::arg("spec"), py::arg("weight"), py::arg("r"));
    m.def("intrinsic_distance", &intrinsic_distance, py::arg("spec"), py::arg("r"));
    m.def("volume_test_integrand", &volume_test_integrand, py::arg("spec"), py::arg("r"));

    py::class_<PartialSum>(m, "PartialSum")
        .def_readonly("R", &PartialSum::R)
        .def_readonly("value", &PartialSum::value)
        .def_readonly("log_value", &PartialSum::log_value);
    py::class_<TailVerdict>(m, "TailVerdict")
        .def_readonly("classification", &TailVerdict::classification)
        .def_readonly("partial_sums", &TailVerdict::partial_sums)
        .def_readonly("growth_exponent", &TailVerdict::growth_exponent)
        .def_readonly("confidence_note", &TailVerdict::confidence_note)
        .def_readonly("limit", &TailVerdict::limit)
        .def_readonly("saturated", &TailVerdict::saturated);
    m.def("classify_tail", [](const std::function<double(double)>& F, double a) { return classify_tail(F, a); },
          py::arg("F"), py::arg("a") = 1.0);
    m.def("generalized_volume_test", [](const ManifoldSpec& s, double a) { return generalized_volume_test(s, a); },
          py::arg("spec"), py::arg("a") = 1.0, release());
    m.def("sturm_test", [](const ManifoldSpec& s) { return sturm_test(s); }, py::arg("spec"), release());

    py::class_<RadialSolution>(m, "RadialSolution")
        .def_readonly("grid", &RadialSolution::grid)
        .def_readonly("values", &RadialSolution::values)
        .def_readonly("flux", &RadialSolution::flux)
        .def_readonly("alpha", &RadialSolution::alpha)
        .def_readonly("blowup_radius", &RadialSolution::blowup_radius);
    m.def("solve_radial_eigen", &solve_radial_eigen, py::arg("spec"), py::arg("alpha"), py::arg("R"),
          py::arg("M") = 4096, py::arg("richardson") = true, release());
    py::class_<KhasminskiiResult>(m, "KhasminskiiResult")
        .def_readonly("verdict", &KhasminskiiResult::verdict)
        .def_readonly("samples", &KhasminskiiResult::samples)
        .def_readonly("blowup_radius", &KhasminskiiResult::blowup_radius)
        .def_readonly("bound", &KhasminskiiResult::bound)
        .def_readonly("note", &KhasminskiiResult::note);
    m.def("khasminskii_verdict", [](const ManifoldSpec& s, double alpha) { return khasminskii_verdict(s, alpha); },
          py::arg("spec"), py::arg("alpha") = 1.0, release());

    py::class_<RadialGrid>(m, "RadialGrid")
        .def_readonly("r", &RadialGrid::r)
        .def_readonly("vhat", &RadialGrid::vhat)
        .def("weights", &RadialGrid::weights)
        .def("conductances", &RadialGrid::conductances)
        .def("cells", &RadialGrid::cells);
    m.def("build_grid", &build_grid, py::arg("spec"), py::arg("R"), py::arg("M"));
    m.def("step_heat", &step_heat, py::arg("grid"), py::arg("state"), py::arg("dt"), py::arg("source"));
    py::class_<SemigroupRun>(m, "SemigroupRun")
        .def_readonly("grid", &SemigroupRun::grid)
        .def_readonly("dt", &SemigroupRun::dt)
        .def_readonly("steps", &SemigroupRun::steps)
        .def_readonly("times", &SemigroupRun::times)
        .def_readonly("U", &SemigroupRun::U)
        .def_readonly("W", &SemigroupRun::W)
        .def_readonly("H", &SemigroupRun::H)
        .def_readonly("heat_loss_at_origin", &SemigroupRun::heat_loss_at_origin)
        .def_readonly("duhamel_gap", &SemigroupRun::duhamel_gap);
    m.def(
        "run_H",
        [](const ManifoldSpec& s, double R, std::size_t M, double t_end, double dt, std::vector<double> alphas,
           std::size_t stride) {
            RunOptions o;
            o.laplace_alphas = std::move(alphas);
            o.record_stride = stride;
            return run_H(s, R, M, t_end, dt, o);
        },
        py::arg("spec"), py::arg("R"), py::arg("M"), py::arg("t_end"), py::arg("dt"),
        py::arg("laplace_alphas") = std::vector<double>{}, py::arg("record_stride") = 0, release());
    m.def("run_N", py::overload_cast<const RadialGrid&, double>(&run_N), py::arg("grid"), py::arg("alpha"));
    m.def("laplace_consistency", &laplace_consistency, py::arg("run"), py::arg("N"), py::arg("alpha"), release());
    py::class_<SweepEntry>(m, "SweepEntry")
        .def_readonly("R", &SweepEntry::R)
        .def_readonly("H_origin", &SweepEntry::H_origin)
        .def_readonly("N_origin", &SweepEntry::N_origin)
        .def_readonly("heat_loss", &SweepEntry::heat_loss);
    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("entries", &SweepResult::entries)
        .def_readonly("epsilon_R", &SweepResult::epsilon_R)
        .def_readonly("last_run", &SweepResult::last_run);
    m.def(
        "exhaustion_sweep",
        [](const ManifoldSpec& s, std::vector<double> radii, double t_probe, double alpha, std::size_t cells, double dt) {
            return exhaustion_sweep(s, radii, t_probe, alpha, {cells, dt});
        },
        py::arg("spec"), py::arg("radii"), py::arg("t_probe") = 1.0, py::arg("alpha") = 1.0, py::arg("cells") = 2048,
        py::arg("dt") = 1e-3, release());

    py::class_<DichotomyResult>(m, "DichotomyResult")
        .def_readonly("passed", &DichotomyResult::pass)
        .def_property_readonly("kind", [](const DichotomyResult& d) { return std::string(to_string(d.kind)); })
        .def_readonly("offending", &DichotomyResult::offending)
        .def_readonly("note", &DichotomyResult::note);
    m.def("dichotomy_check", &dichotomy_check, py::arg("run"), py::arg("epsilon_R"), py::arg("t_min") = py::none());
    py::class_<SemigroupPlateau>(m, "SemigroupPlateau")
        .def_readonly("t_probe", &SemigroupPlateau::t_probe)
        .def_readonly("H_plateau", &SemigroupPlateau::H_plateau)
        .def_readonly("epsilon_R", &SemigroupPlateau::epsilon_R)
        .def_readonly("verdict", &SemigroupPlateau::verdict)
        .def_readonly("dichotomy", &SemigroupPlateau::dichotomy);
    py::class_<ConsistencyFlag>(m, "ConsistencyFlag")
        .def_readonly("name", &ConsistencyFlag::name)
        .def_readonly("passed", &ConsistencyFlag::pass)
        .def_readonly("detail", &ConsistencyFlag::detail);
    py::class_<ConservationReport>(m, "ConservationReport")
        .def_readonly("spec_digest", &ConservationReport::spec_digest)
        .def_readonly("volume_verdict", &ConservationReport::volume_verdict)
        .def_readonly("khasminskii", &ConservationReport::khasminskii)
        .def_readonly("semigroup", &ConservationReport::semigroup)
        .def_readonly("timechange_verdict", &ConservationReport::timechange_verdict)
        .def_readonly("errors", &ConservationReport::errors)
        .def_readonly("consistency", &ConservationReport::consistency)
        .def_readonly("disagreements", &ConservationReport::disagreements)
        .def_readonly("final", &ConservationReport::final)
        .def("text", [](const ConservationReport& r) { return render(analysis_report(r)); });
    m.def(
        "analyze",
        [](const ManifoldSpec& s, std::vector<double> alphas, std::vector<double> radii, std::size_t cells, double dt,
           double t_probe, bool sturm) {
            AnalysisParams p;
            p.alphas = std::move(alphas);
            p.radii = std::move(radii);
            p.cells = cells;
            p.dt = dt;
            p.t_probe = t_probe;
            p.sturm = sturm;
            return analyze(s, p);
        },
        py::arg("spec"), py::arg("alphas") = std::vector<double>{1.0}, py::arg("radii") = std::vector<double>{4, 5, 6},
        py::arg("cells") = 2048, py::arg("dt") = 1e-3, py::arg("t_probe") = 1.0, py::arg("sturm") = true, release());

    py::class_<PotentialResult>(m, "PotentialResult")
        .def_readonly("potential", &PotentialResult::potential)
        .def_readonly("exponent", &PotentialResult::exponent)
        .def_readonly("retest", &PotentialResult::retest)
        .def_readonly("applicable", &PotentialResult::applicable)
        .def_readonly("note", &PotentialResult::note);
    m.def("build_conservative_potential", &build_conservative_potential, py::arg("spec"),
          py::arg("strategy") = PotentialStrategy::corollary_radial, release());

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("r_max", &RunConfig::r_max)
        .def_readonly("radii", &RunConfig::radii)
        .def_readonly("nodes", &RunConfig::nodes)
        .def_readonly("dt", &RunConfig::dt)
        .def_readonly("t_end", &RunConfig::t_end)
        .def_readonly("alpha", &RunConfig::alpha)
        .def("manifold", &RunConfig::manifold)
        .def("text", &to_config_text);
    m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));
}
