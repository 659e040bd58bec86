#pragma once

// JSON problem configuration. Every block maps onto the library types; unknown keys,
// missing required keys and out-of-range values raise ConfigError naming the key path.

#include <optional>
#include <string>

#include "json.hpp"

#include "fracevo/solver.hpp"

namespace fracevo::config {

inline constexpr int kSchemaVersion = 1;

struct Tolerances {
    double series = 1e-10;        // solver tolerance (CauchyProblem::tol)
    double contour = 1e-10;       // relative quadrature tolerance of the contour oracle
    double oracle = 1e-6;         // solve vs contour, relative
    double residual_analytic = 1e-8;
    double residual_numeric = 1e-4;
    double numeric_derivative = 1e-7; // requested accuracy of the quadrature derivative
    double initial = 1e-3;        // ||u(1e-4) - f|| / ||f||
    double beta = 1e-8;
    double regrouping = 1e-10;
    double jet = 1e-5;

    bool operator==(const Tolerances&) const = default;
};

struct Analysis {
    double ladder_start = 1e4;
    std::size_t rungs = 6;
    std::size_t samples = 90;
    std::size_t indicator_points = 181;
    double exceptional_d = 0.1;

    bool operator==(const Analysis&) const = default;
};

struct Output {
    std::string dir = "out";
    std::string trajectory = "trajectory.csv";
    std::string indicator = "indicator.csv";
    std::string report = "report.json";

    bool operator==(const Output&) const = default;
};

struct Equation {
    double alpha = 2.0;
    std::vector<cplx> initial;
    std::vector<double> times;
    double R = 0.0;
    double kappa = 0.5;

    bool operator==(const Equation&) const = default;
};

struct ProblemConfig {
    int schema_version = kSchemaVersion;
    entire::EntireFunctionSpec function;
    std::optional<OperatorSpec> op;
    std::optional<Equation> equation;
    Tolerances tolerances;
    Analysis analysis;
    Output output;
};

ProblemConfig parse(const nlohmann::json& j);
ProblemConfig load(const std::string& path);
nlohmann::json serialize(const ProblemConfig& c);

/// Whether two configs describe the same problem (all fields, bitwise doubles).
bool same(const ProblemConfig& a, const ProblemConfig& b);

/// Requires the operator and equation blocks.
CauchyProblem to_problem(const ProblemConfig& c, bool force = false);

} // namespace fracevo::config
