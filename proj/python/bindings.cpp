#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>

#include "fwlab/errors.hpp"
#include "fwlab/functions.hpp"
#include "fwlab/mollify.hpp"
#include "fwlab/norms.hpp"
#include "fwlab/params.hpp"
#include "fwlab/rearrange.hpp"
#include "fwlab/report.hpp"
#include "fwlab/verify.hpp"

namespace py = pybind11;
using namespace fwlab;

namespace {

McConfig make_config(std::uint64_t seed, std::int64_t samples) {
    McConfig cfg;
    cfg.seed = seed;
    cfg.sample_count = samples;
    return cfg;
}

std::string dump(const Json& j) { return j.dump(); }

CheckKind check_kind(const std::string& name) {
    for (CheckKind k : {CheckKind::hardy, CheckKind::rellich, CheckKind::ckn_hardy, CheckKind::ckn_sobolev,
                        CheckKind::grad_equivalence, CheckKind::lorentz_embedding}) {
        if (to_string(k) == name) return k;
    }
    throw UnknownName("unknown check '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Weighted higher order fractional Sobolev toolkit (native core)";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ConstraintViolation>(m, "ConstraintViolation", error.ptr());
    py::register_exception<DegenerateExponent>(m, "DegenerateExponent", error.ptr());
    py::register_exception<UnknownName>(m, "UnknownName", error.ptr());
    py::register_exception<NonIntegrableSingularity>(m, "NonIntegrableSingularity", error.ptr());
    py::register_exception<NoConvergence>(m, "NoConvergence", error.ptr());
    py::register_exception<RearrangementOnlyFunction>(m, "RearrangementOnlyFunction", error.ptr());
    py::register_exception<NonMonotoneProfile>(m, "NonMonotoneProfile", error.ptr());
    py::register_exception<DivergentQuasinorm>(m, "DivergentQuasinorm", error.ptr());
    py::register_exception<ExponentMismatch>(m, "ExponentMismatch", error.ptr());

    py::class_<Params>(m, "Params")
        .def_property_readonly("dim", &Params::dim)
        .def_property_readonly("s", &Params::s)
        .def_property_readonly("sigma", &Params::sigma)
        .def_property_readonly("p", &Params::p)
        .def_property_readonly("a", &Params::a)
        .def_property_readonly("p_star_sigma", &Params::p_star_sigma)
        .def_property_readonly("p_star_s", &Params::p_star_s)
        .def_property_readonly("p_lorentz", &Params::p_lorentz)
        .def_property_readonly("kappa", &Params::homogeneous_kappa)
        .def_property_readonly("in_window", &Params::in_window)
        .def("__repr__", [](const Params& p) {
            return "Params(dim=" + std::to_string(p.dim()) + ", s=" + std::to_string(p.s()) +
                   ", p=" + std::to_string(p.p()) + ", a=" + std::to_string(p.a()) + ")";
        });
    m.def("validate", py::overload_cast<int, double, double, double>(&validate), py::arg("dim"), py::arg("s"),
          py::arg("p"), py::arg("a"));
    m.def("relaxed", &relaxed, py::arg("dim"), py::arg("s"), py::arg("p"), py::arg("a"));
    m.def("lorentz_target", py::overload_cast<int, double, double, double>(&lorentz_target));
    m.def("critical_exponent", py::overload_cast<int, double, double>(&critical_exponent));
    m.def("unit_ball_volume", &unit_ball_volume);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("value", &Estimate::value)
        .def_readonly("uncertainty", &Estimate::uncertainty)
        .def_readonly("samples", &Estimate::samples)
        .def_property_readonly("method", [](const Estimate& e) { return to_string(e.method); })
        .def("__repr__", [](const Estimate& e) {
            return "Estimate(" + std::to_string(e.value) + " +- " + std::to_string(e.uncertainty) + ")";
        });

    py::class_<TestFunction>(m, "TestFunction")
        .def_property_readonly("name", &TestFunction::name)
        .def_property_readonly("dim", &TestFunction::dim)
        .def_property_readonly("radial", &TestFunction::radial)
        .def_property_readonly("smooth", &TestFunction::smooth)
        .def("__call__", [](const TestFunction& f, const std::vector<double>& x) {
            if (static_cast<int>(x.size()) != f.dim()) throw UnknownName("point has the wrong dimension");
            return f(std::span<const double>(x));
        });
    m.def("catalog_names", &catalog_names);
    m.def("smooth_catalog_names", &smooth_catalog_names);
    m.def("catalog", py::overload_cast<std::string_view, int>(&catalog), py::arg("name"), py::arg("dim"));
    m.def("scale", &scale, py::arg("u"), py::arg("lam"), py::arg("kappa") = 0.0);

    m.def(
        "weighted_lp",
        [](const TestFunction& u, double q, double beta, std::uint64_t seed, std::int64_t samples) {
            return weighted_lp(u, q, beta, make_config(seed, samples));
        },
        py::arg("u"), py::arg("q"), py::arg("beta"), py::arg("seed") = 20240101, py::arg("samples") = 200000);
    m.def(
        "gagliardo",
        [](const TestFunction& u, double t, double p, double a, std::uint64_t seed, std::int64_t samples) {
            return gagliardo(u, t, p, a, make_config(seed, samples));
        },
        py::arg("u"), py::arg("t"), py::arg("p"), py::arg("a"), py::arg("seed") = 20240101, py::arg("samples") = 200000);
    m.def(
        "higher_seminorm",
        [](const TestFunction& u, const Params& params, std::uint64_t seed, std::int64_t samples) {
            return higher_seminorm(u, params, make_config(seed, samples));
        },
        py::arg("u"), py::arg("params"), py::arg("seed") = 20240101, py::arg("samples") = 200000);
    m.def(
        "homogeneous_norm",
        [](const TestFunction& u, const Params& params, std::uint64_t seed, std::int64_t samples) {
            const HomogeneousNorm h = homogeneous_norm(u, params, make_config(seed, samples));
            return py::make_tuple(h.gradient_part, h.seminorm_part, h.total);
        },
        py::arg("u"), py::arg("params"), py::arg("seed") = 20240101, py::arg("samples") = 200000);

    m.def(
        "lorentz_quasinorm",
        [](const TestFunction& f, double P, double Q, std::uint64_t seed, std::int64_t samples) {
            return lorentz_quasinorm(f, P, Q, make_config(seed, samples));
        },
        py::arg("f"), py::arg("P"), py::arg("Q"), py::arg("seed") = 20240101, py::arg("samples") = 200000);
    m.def("layer_cake_check_json", [](const TestFunction& f) { return dump(to_json(layer_cake_check(f), f.name())); });
    m.def("hardy_layercake_json", [](const TestFunction& u, const Params& params) {
        return dump(to_json(hardy_layercake_identity(u, params), u.name()));
    });
    m.def("sobolev_layercake_json", [](const TestFunction& u, const Params& params) {
        return dump(to_json(sobolev_layercake_identity(u, params), u.name()));
    });

    m.def("mollifier_mass", [](int n, int dim) { return mollifier(n, dim).mass(); }, py::arg("n"), py::arg("dim"));
    m.def(
        "approximation_residual",
        [](const TestFunction& u, int n, const Params& params, std::uint64_t seed, std::int64_t samples) {
            return approximation_sequence(u, n, params, make_config(seed, samples)).residual;
        },
        py::arg("u"), py::arg("n"), py::arg("params"), py::arg("seed") = 20240101, py::arg("samples") = 200000);

    m.def("elementary_constants", [](int dim, double q) {
        const ElementaryConstants c = elementary_constants(dim, q);
        return py::make_tuple(c.A, c.B);
    });
    m.def(
        "elementary_bounds_json",
        [](int dim, double q, int trials, std::uint64_t seed) { return dump(to_json(elementary_bounds_check(dim, q, trials, seed))); },
        py::arg("dim"), py::arg("q"), py::arg("trials") = 10000, py::arg("seed") = 20240101);
    m.def(
        "check_json",
        [](const std::string& kind, const TestFunction& u, const Params& params, std::uint64_t seed, std::int64_t samples) {
            const McConfig cfg = make_config(seed, samples);
            if (kind == "ckn_first_order") return dump(to_json(ckn_first_order_check(u, params, cfg)));
            return dump(to_json(run_check(check_kind(kind), u, params, cfg)));
        },
        py::arg("kind"), py::arg("u"), py::arg("params"), py::arg("seed") = 20240101, py::arg("samples") = 200000);
    m.def(
        "scale_orbit_json",
        [](const std::string& kind, const TestFunction& u, const Params& params, std::vector<double> lambdas,
           double kappa, std::uint64_t seed, std::int64_t samples) {
            return dump(to_json(scale_orbit(check_kind(kind), u, params, lambdas, kappa, make_config(seed, samples))));
        },
        py::arg("kind"), py::arg("u"), py::arg("params"), py::arg("lambdas"), py::arg("kappa") = 0.0,
        py::arg("seed") = 20240101, py::arg("samples") = 200000);
    m.def(
        "poincare_probe_json",
        [](const TestFunction& u, const Params& params, std::vector<double> lambdas, bool gradient, std::uint64_t seed,
           std::int64_t samples) {
            const McConfig cfg = make_config(seed, samples);
            return dump(to_json(gradient ? gradient_poincare_failure_probe(u, params, lambdas, cfg)
                                         : poincare_failure_probe(u, params, lambdas, cfg)));
        },
        py::arg("u"), py::arg("params"), py::arg("lambdas"), py::arg("gradient") = false, py::arg("seed") = 20240101,
        py::arg("samples") = 200000);
    m.def(
        "weak_young_json",
        [](double d, const TestFunction& h, double q, std::uint64_t seed, std::int64_t samples) {
            return dump(to_json(weak_young_check(d, h, q, make_config(seed, samples))));
        },
        py::arg("d"), py::arg("h"), py::arg("q"), py::arg("seed") = 20240101, py::arg("samples") = 200000);

    m.def("run_report_json", [](const std::map<std::string, std::string>& settings) {
        RunConfig config;
        for (const auto& [k, v] : settings) apply_setting(config, k, v);
        const ReportBundle bundle = run(config);
        return py::make_tuple(bundle.to_json().dump(), bundle.exit_code());
    });
}
