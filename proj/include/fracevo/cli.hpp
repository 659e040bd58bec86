#pragma once

// analyze | solve | verify <config> [--force] [--checks=LIST] [--out DIR]

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracevo/config.hpp"

namespace fracevo::cli {

enum ExitCode : int { Ok = 0, ConfigFailure = 2, NumericFailure = 3, AuditFailure = 4, VerificationFailure = 5 };

/// Environment variable that overrides output.dir (an explicit --out wins over it).
inline constexpr const char* kOutEnv = "FRACEVO_OUT";

inline const std::vector<std::string> kCheckNames{"audit", "oracle", "residual", "initial",
                                                  "beta_k", "regrouping", "jets"};

struct Options {
    std::string command;
    std::string config;
    bool force = false;
    std::vector<std::string> checks;   // empty: all
    std::optional<std::string> out;
    bool corrupt = false;              // scale the solution exponent by 1.01 (sensitivity probe)
};

struct Outcome {
    int exit_code = Ok;
    nlohmann::ordered_json report;
};

Outcome analyze(const config::ProblemConfig& c);
/// The trajectory CSV is returned through `csv` when the solve ran.
Outcome solve(const config::ProblemConfig& c, const Options& o, std::string* csv = nullptr);
Outcome verify(const config::ProblemConfig& c, const Options& o);

/// Rows t, Re(u_1), Im(u_1), ..., 17 significant digits.
std::string trajectory_csv(const std::vector<double>& times, const std::vector<Vec>& u);

/// Parses argv, runs the command, writes outputs. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fracevo::cli
