#include "dtwist/app.hpp"
#include "dtwist/errors.hpp"
#include "dtwist/manifolds.hpp"
#include "dtwist/regularity.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace dtwist;

namespace {

// JSON values cross the boundary through Python's json module.
py::object to_python(const nlohmann::json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

RunConfig make_config(const std::map<std::string, std::string>& overrides, const std::string& path)
{
    RunConfig c = path.empty() ? RunConfig{} : load_config(path);
    for (const auto& [k, v] : overrides) apply_setting(c, k, v);
    return c;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Finite truncation of a modified Herman/Denjoy symplectic twist map";
    m.attr("SCHEMA_VERSION") = kSchemaVersion;

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
    py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);

    m.def("default_config", &default_config_ini);

    m.def(
        "run",
        [](const std::string& command, const std::map<std::string, std::string>& overrides,
           const std::string& config, bool write_files) {
            CommandResult r = run_command(parse_command(command), make_config(overrides, config), write_files);
            return py::make_tuple(to_python(r.report), r.exit_code);
        },
        py::arg("command"), py::arg("overrides") = std::map<std::string, std::string>{},
        py::arg("config") = "", py::arg("write_files") = false,
        "Run a command; returns (report, exit_code).");

    py::class_<BuiltSystem, std::shared_ptr<BuiltSystem>>(m, "System")
        .def(py::init([](const std::map<std::string, std::string>& overrides, const std::string& config) {
                 return std::make_shared<BuiltSystem>(make_config(overrides, config));
             }),
             py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("config") = "")
        .def_property_readonly("M", [](const BuiltSystem& s) { return s.sequences().M; })
        .def("summary", [](const BuiltSystem& s) { return to_python(s.construction_summary()); })
        .def("ell", [](const BuiltSystem& s, long k) { return s.sequences().ell.at(k); })
        .def("K", [](const BuiltSystem& s, long k) { return s.sequences().K.at(k); })
        .def("alpha", [](const BuiltSystem& s, long k) { return s.sequences().alpha.at(k); })
        .def("mu", [](const BuiltSystem& s, long k) { return s.table().mu(k); })
        .def("g", [](const BuiltSystem& s, double x) { return s.circle().forward(x); })
        .def("g_inverse", [](const BuiltSystem& s, double y) { return s.circle().inverse(y); })
        .def("phi", [](const BuiltSystem& s, double x) { return s.twist().phi(x); })
        .def("curve", [](const BuiltSystem& s, double theta) { return s.twist().curve(theta); })
        .def("forward",
             [](const BuiltSystem& s, double theta, double r) {
                 AnnulusPoint p = s.twist().forward({theta, r});
                 return py::make_tuple(p.theta, p.r);
             })
        .def("backward",
             [](const BuiltSystem& s, double theta, double r) {
                 AnnulusPoint p = s.twist().backward({theta, r});
                 return py::make_tuple(p.theta, p.r);
             })
        .def("rotation_number",
             [](const BuiltSystem& s, double x0, long n) { return rotation_number_estimate(s.circle(), x0, n); })
        .def("invariance",
             [](const BuiltSystem& s, long samples, std::uint64_t seed) {
                 return to_python(verify_invariant_curve(s.twist(), samples, seed));
             },
             py::arg("samples") = 1000, py::arg("seed") = 20240601)
        .def("regularity", [](const BuiltSystem& s, int grid) {
                 return to_python(second_derivative_scan(s.denjoy(), grid));
             },
             py::arg("grid") = 256)
        .def("manifolds", [](const BuiltSystem& s, long k_max) {
            return to_python(manifold_iterate_check(s.twist(), k_max));
        },
             py::arg("k_max") = 50);
}
