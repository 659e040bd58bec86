#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracevo/cli.hpp"
#include "fracevo/fractional.hpp"

namespace py = pybind11;
using namespace fracevo;

namespace {

config::ProblemConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    return config::parse(j);
}

cli::Options options(bool force, std::vector<std::string> checks, bool corrupt) {
    cli::Options o;
    o.force = force;
    o.checks = std::move(checks);
    o.corrupt = corrupt;
    return o;
}

entire::EntireFunctionSpec function_spec(const std::string& function_json) {
    nlohmann::json j = {{"schema_version", config::kSchemaVersion}, {"function", nlohmann::json::parse(function_json)}};
    return config::parse(j).function;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Series solver for fractional evolution equations with entire-function operator symbols";

    py::register_exception<Error>(m, "FracevoError");

    m.attr("SCHEMA_VERSION") = config::kSchemaVersion;

    m.def("normalize_config", [](const std::string& text) { return config::serialize(parse_config(text)).dump(); },
          py::arg("config_json"), "Parse and re-serialize a config; raises on malformed input.");

    m.def(
        "analyze",
        [](const std::string& text) {
            const auto o = cli::analyze(parse_config(text));
            return py::make_tuple(o.exit_code, o.report.dump());
        },
        py::arg("config_json"), "Returns (exit_code, report_json).");

    m.def(
        "solve",
        [](const std::string& text, bool force, bool corrupt) {
            const auto c = parse_config(text);
            std::string csv;
            const auto o = cli::solve(c, options(force, {}, corrupt), &csv);
            return py::make_tuple(o.exit_code, o.report.dump(), csv);
        },
        py::arg("config_json"), py::arg("force") = false, py::arg("corrupt") = false,
        "Returns (exit_code, report_json, trajectory_csv).");

    m.def(
        "verify",
        [](const std::string& text, std::vector<std::string> checks, bool force, bool corrupt) {
            const auto o = cli::verify(parse_config(text), options(force, std::move(checks), corrupt));
            return py::make_tuple(o.exit_code, o.report.dump());
        },
        py::arg("config_json"), py::arg("checks") = std::vector<std::string>{}, py::arg("force") = false,
        py::arg("corrupt") = false, "Returns (exit_code, report_json).");

    m.def(
        "run",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "fracevo");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line tool; returns (exit_code, stdout, stderr).");

    m.def(
        "phi_alpha",
        [](const std::string& function_json, double alpha, cplx lambda) {
            return phi_alpha(function_spec(function_json), alpha, lambda);
        },
        py::arg("function_json"), py::arg("alpha"), py::arg("lam"));

    m.def(
        "h_coefficients",
        [](const std::string& function_json, double alpha, double t, cplx mu, std::size_t order) {
            return h_coefficients(function_spec(function_json), alpha, t, mu, order);
        },
        py::arg("function_json"), py::arg("alpha"), py::arg("t"), py::arg("mu"), py::arg("order"));

    m.def("rl_mode_identity", &rl_mode_identity, py::arg("w"), py::arg("alpha"), py::arg("t"));

    m.def("indicator_positivity",
          [](double order, std::vector<std::pair<double, double>> knots, std::size_t grid_points) {
              std::vector<entire::AngularDensity::Knot> ks;
              for (const auto& [angle, mass] : knots) ks.push_back({angle, mass});
              const auto rep = entire::check_indicator_positivity(order, entire::AngularDensity::from_knots(ks),
                                                                  grid_points);
              return py::make_tuple(rep.nonnegative, rep.min_value);
          },
          py::arg("order"), py::arg("knots"), py::arg("grid_points") = 181,
          "Knots are (angle, cumulative mass) pairs; returns (nonnegative, min H).");
}
