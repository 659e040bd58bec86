#include "fracevo/config.hpp"

#include <fstream>
#include <set>

namespace fracevo::config {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) { fail(ErrorCode::ConfigError, path + ": " + what); }

// An object whose keys must all be consumed.
class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) bad(path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& at(const std::string& key) {
        if (!j_.contains(key)) bad(path(key), "required key is missing");
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) bad(path(key), "expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    double positive(const std::string& key, double fallback) {
        const double v = number(key, fallback);
        if (!(v > 0.0)) bad(path(key), "must be positive");
        return v;
    }

    long long integer(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_integer()) bad(path(key), "expected an integer");
        return v.get<long long>();
    }
    long long integer(const std::string& key, long long fallback) { return has(key) ? integer(key) : fallback; }

    std::size_t count(const std::string& key, std::size_t fallback) {
        const long long v = integer(key, static_cast<long long>(fallback));
        if (v < 1) bad(path(key), "must be a positive integer");
        return static_cast<std::size_t>(v);
    }

    std::string text(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) bad(path(key), "expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_boolean()) bad(path(key), "expected true or false");
        return v.get<bool>();
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) bad(path(key), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

cplx complex_value(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    bad(path, "expected a number or [re, im]");
}

std::vector<cplx> complex_list(const json& v, const std::string& path) {
    if (!v.is_array()) bad(path, "expected a list");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex_value(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<double> real_list(const json& v, const std::string& path) {
    if (!v.is_array()) bad(path, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) bad(path + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json complex_list_json(const std::vector<cplx>& zs) {
    json a = json::array();
    for (const auto& z : zs) a.push_back(complex_json(z));
    return a;
}

entire::ZeroSequence parse_zeros(const json& j, const std::string& path) {
    Block b(j, path);
    const std::string kind = b.text("kind");
    auto angles = [&] { return b.has("angles") ? real_list(b.at("angles"), b.path("angles")) : std::vector<double>{0.0}; };
    entire::ZeroSequence z;
    try {
        if (kind == "explicit") {
            auto values = complex_list(b.at("values"), b.path("values"));
            for (std::size_t i = 0; i < values.size(); ++i)
                if (values[i] == cplx{}) bad(b.path("values") + "[" + std::to_string(i) + "]", "zeros must be nonzero");
            z = entire::ZeroSequence::explicit_list(std::move(values), b.flag("complete", true));
        } else if (kind == "power") {
            const double scale = b.positive("scale", 1.0), exponent = b.positive("exponent", 1.0);
            const double shift = b.number("shift", 0.0);
            z = entire::ZeroSequence::power(scale, exponent, shift, angles());
        } else if (kind == "power_log") {
            const double scale = b.positive("scale", 1.0), exponent = b.positive("exponent", 1.0);
            const double log_power = b.number("log_power"), offset = b.number("offset", 1.0);
            z = entire::ZeroSequence::power_log(scale, exponent, log_power, offset, angles());
        } else if (kind == "geometric") {
            const double scale = b.positive("scale", 1.0), base = b.number("base");
            if (!(base > 1.0)) bad(b.path("base"), "must exceed 1");
            z = entire::ZeroSequence::geometric(scale, base, angles());
        } else {
            bad(b.path("kind"), "unknown zero family '" + kind + "' (explicit, power, power_log, geometric)");
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        bad(path, e.what());
    }
    b.finish();
    return z;
}

json zeros_json(const entire::ZeroSequence& z) {
    json j;
    switch (z.family()) {
    case entire::ZeroFamily::Explicit:
        j = {{"kind", "explicit"}, {"values", complex_list_json(z.values())}, {"complete", z.complete()}};
        return j;
    case entire::ZeroFamily::Power:
        j = {{"kind", "power"}, {"scale", z.scale()}, {"exponent", z.exponent()}, {"shift", z.shift()}};
        break;
    case entire::ZeroFamily::PowerLog:
        j = {{"kind", "power_log"}, {"scale", z.scale()}, {"exponent", z.exponent()},
             {"log_power", z.log_power()}, {"offset", z.shift()}};
        break;
    case entire::ZeroFamily::Geometric:
        j = {{"kind", "geometric"}, {"scale", z.scale()}, {"base", z.base()}};
        break;
    }
    j["angles"] = z.angles();
    return j;
}

entire::EntireFunctionSpec parse_function(const json& j) {
    Block b(j, "function");
    entire::EntireFunctionSpec s;
    s.zeros = parse_zeros(b.at("zeros"), "function.zeros");
    const long long genus = b.integer("genus");
    if (genus < 0) bad("function.genus", "must be nonnegative");
    s.genus = static_cast<int>(genus);
    if (b.has("constant")) s.constant = complex_value(b.at("constant"), "function.constant");
    if (s.constant == cplx{}) bad("function.constant", "must be nonzero");
    const long long m = b.integer("multiplicity", 0);
    if (m < 0) bad("function.multiplicity", "must be nonnegative");
    s.multiplicity = static_cast<int>(m);
    s.truncation = b.count("truncation", s.truncation);
    s.tail_tolerance = b.positive("tail_tolerance", s.tail_tolerance);
    b.finish();
    try {
        s.validate();
    } catch (const Error& e) {
        bad("function.genus", e.what());
    }
    return s;
}

json function_json(const entire::EntireFunctionSpec& s) {
    return {{"zeros", zeros_json(s.zeros)},          {"genus", s.genus},
            {"constant", complex_json(s.constant)}, {"multiplicity", s.multiplicity},
            {"truncation", s.truncation},           {"tail_tolerance", s.tail_tolerance}};
}

OperatorSpec parse_operator(const json& j) {
    Block b(j, "operator");
    OperatorSpec s;
    s.eigenvalues = complex_list(b.at("eigenvalues"), "operator.eigenvalues");
    if (s.eigenvalues.empty()) bad("operator.eigenvalues", "at least one eigenvalue is needed");
    const json& chains = b.at("chains");
    if (!chains.is_array() || chains.empty()) bad("operator.chains", "expected a nonempty list");
    std::size_t dim = 0;
    for (std::size_t i = 0; i < chains.size(); ++i) {
        const std::string p = "operator.chains[" + std::to_string(i) + "]";
        Block c(chains[i], p);
        const long long q = c.integer("eigenvalue"), len = c.integer("length");
        if (q < 0 || static_cast<std::size_t>(q) >= s.eigenvalues.size()) bad(p + ".eigenvalue", "index out of range");
        if (len < 1) bad(p + ".length", "must be at least 1");
        c.finish();
        s.chains.push_back({static_cast<std::size_t>(q), static_cast<std::size_t>(len)});
        dim += static_cast<std::size_t>(len);
    }
    if (b.has("basis")) {
        Block bb(b.at("basis"), "operator.basis");
        const std::string kind = bb.text("kind");
        if (kind == "standard") {
            s.basis.kind = BasisKind::Standard;
            s.basis.chain_scale = bb.positive("chain_scale", 1.0);
        } else if (kind == "seeded_random") {
            s.basis.kind = BasisKind::SeededRandom;
            const long long seed = bb.integer("seed");
            if (seed < 0) bad("operator.basis.seed", "must be nonnegative");
            s.basis.seed = static_cast<std::uint64_t>(seed);
            s.basis.scale = bb.positive("scale", s.basis.scale);
            s.basis.chain_scale = bb.positive("chain_scale", 1.0);
        } else if (kind == "explicit") {
            s.basis.kind = BasisKind::Explicit;
            const json& cols = bb.at("columns");
            if (!cols.is_array() || cols.size() != dim)
                bad("operator.basis.columns", "expected " + std::to_string(dim) + " columns");
            s.basis.vectors = Mat(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
            for (std::size_t c = 0; c < dim; ++c) {
                const std::string p = "operator.basis.columns[" + std::to_string(c) + "]";
                const auto col = complex_list(cols[c], p);
                if (col.size() != dim) bad(p, "expected " + std::to_string(dim) + " entries");
                for (std::size_t r = 0; r < dim; ++r)
                    s.basis.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
            }
        } else {
            bad("operator.basis.kind", "unknown basis '" + kind + "' (standard, seeded_random, explicit)");
        }
        bb.finish();
    }
    if (b.has("sector")) {
        const auto sec = real_list(b.at("sector"), "operator.sector");
        if (sec.size() != 2 || !(sec[0] < 0.0 && sec[1] > 0.0))
            bad("operator.sector", "expected [theta0, theta1] with theta0 < 0 < theta1");
        s.sector = {sec[0], sec[1]};
    }
    b.finish();
    return s;
}

json operator_json(const OperatorSpec& s) {
    json chains = json::array();
    for (const auto& c : s.chains) chains.push_back({{"eigenvalue", c.eigenvalue}, {"length", c.length}});
    json basis;
    switch (s.basis.kind) {
    case BasisKind::Standard: basis = {{"kind", "standard"}, {"chain_scale", s.basis.chain_scale}}; break;
    case BasisKind::SeededRandom:
        basis = {{"kind", "seeded_random"}, {"seed", s.basis.seed}, {"scale", s.basis.scale}, {"chain_scale", s.basis.chain_scale}};
        break;
    case BasisKind::Explicit: {
        json cols = json::array();
        for (Eigen::Index c = 0; c < s.basis.vectors.cols(); ++c) {
            std::vector<cplx> col(static_cast<std::size_t>(s.basis.vectors.rows()));
            for (Eigen::Index r = 0; r < s.basis.vectors.rows(); ++r) col[static_cast<std::size_t>(r)] = s.basis.vectors(r, c);
            cols.push_back(complex_list_json(col));
        }
        basis = {{"kind", "explicit"}, {"columns", cols}};
        break;
    }
    }
    return {{"eigenvalues", complex_list_json(s.eigenvalues)},
            {"chains", chains},
            {"basis", basis},
            {"sector", {s.sector.theta0, s.sector.theta1}}};
}

Equation parse_equation(const json& j) {
    Block b(j, "equation");
    Equation e;
    e.alpha = b.number("alpha");
    if (!(e.alpha >= 1.0)) bad("equation.alpha", "must be at least 1");
    e.initial = complex_list(b.at("initial"), "equation.initial");
    e.times = real_list(b.at("times"), "equation.times");
    if (e.times.empty()) bad("equation.times", "at least one time is needed");
    for (std::size_t i = 0; i < e.times.size(); ++i)
        if (!(e.times[i] >= 0.0) || (i > 0 && !(e.times[i] > e.times[i - 1])))
            bad("equation.times", "times must be nonnegative and strictly ascending");
    e.R = b.number("R", 0.0);
    if (e.R < 0.0) bad("equation.R", "must be nonnegative (0 selects the default)");
    e.kappa = b.number("kappa", 0.5);
    if (!(e.kappa > 0.0 && e.kappa < 1.0)) bad("equation.kappa", "must lie in (0, 1)");
    b.finish();
    return e;
}

json equation_json(const Equation& e) {
    return {{"alpha", e.alpha}, {"initial", complex_list_json(e.initial)}, {"times", e.times}, {"R", e.R}, {"kappa", e.kappa}};
}

#define FRACEVO_TOLERANCES(X) \
    X(series) X(contour) X(oracle) X(residual_analytic) X(residual_numeric) X(numeric_derivative) X(initial) \
    X(beta) X(regrouping) X(jet)

Tolerances parse_tolerances(const json& j) {
    Block b(j, "tolerances");
    Tolerances t;
#define X(name) t.name = b.positive(#name, t.name);
    FRACEVO_TOLERANCES(X)
#undef X
    b.finish();
    return t;
}

json tolerances_json(const Tolerances& t) {
    json j;
#define X(name) j[#name] = t.name;
    FRACEVO_TOLERANCES(X)
#undef X
    return j;
}

Analysis parse_analysis(const json& j) {
    Block b(j, "analysis");
    Analysis a;
    a.ladder_start = b.positive("ladder_start", a.ladder_start);
    a.rungs = b.count("rungs", a.rungs);
    if (a.rungs < 3) bad("analysis.rungs", "the fit needs at least 3 rungs");
    a.samples = b.count("samples", a.samples);
    a.indicator_points = b.count("indicator_points", a.indicator_points);
    a.exceptional_d = b.positive("exceptional_d", a.exceptional_d);
    b.finish();
    return a;
}

json analysis_json(const Analysis& a) {
    return {{"ladder_start", a.ladder_start}, {"rungs", a.rungs}, {"samples", a.samples},
            {"indicator_points", a.indicator_points}, {"exceptional_d", a.exceptional_d}};
}

Output parse_output(const json& j) {
    Block b(j, "output");
    Output o;
    o.dir = b.text("dir", o.dir);
    o.trajectory = b.text("trajectory", o.trajectory);
    o.indicator = b.text("indicator", o.indicator);
    o.report = b.text("report", o.report);
    b.finish();
    return o;
}

json output_json(const Output& o) {
    return {{"dir", o.dir}, {"trajectory", o.trajectory}, {"indicator", o.indicator}, {"report", o.report}};
}

} // namespace

ProblemConfig parse(const json& j) {
    Block b(j, "");
    ProblemConfig c;
    const long long v = b.integer("schema_version");
    if (v != kSchemaVersion) bad("schema_version", "unsupported version " + std::to_string(v));
    c.schema_version = static_cast<int>(v);
    c.function = parse_function(b.at("function"));
    if (b.has("operator")) c.op = parse_operator(b.at("operator"));
    if (b.has("equation")) c.equation = parse_equation(b.at("equation"));
    if (c.equation && !c.op) bad("operator", "required when an equation block is given");
    if (c.equation) {
        std::size_t dim = 0;
        for (const auto& ch : c.op->chains) dim += ch.length;
        if (c.equation->initial.size() != dim)
            bad("equation.initial", "has " + std::to_string(c.equation->initial.size()) + " entries, the operator has dimension " +
                                        std::to_string(dim));
    }
    if (b.has("tolerances")) c.tolerances = parse_tolerances(b.at("tolerances"));
    if (b.has("analysis")) c.analysis = parse_analysis(b.at("analysis"));
    if (b.has("output")) c.output = parse_output(b.at("output"));
    b.finish();
    return c;
}

ProblemConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigError, path + ": cannot open");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::ConfigError, path + ": " + e.what());
    }
    return parse(j);
}

json serialize(const ProblemConfig& c) {
    json j;
    j["schema_version"] = c.schema_version;
    j["function"] = function_json(c.function);
    if (c.op) j["operator"] = operator_json(*c.op);
    if (c.equation) j["equation"] = equation_json(*c.equation);
    j["tolerances"] = tolerances_json(c.tolerances);
    j["analysis"] = analysis_json(c.analysis);
    j["output"] = output_json(c.output);
    return j;
}

bool same(const ProblemConfig& a, const ProblemConfig& b) { return serialize(a) == serialize(b); }

CauchyProblem to_problem(const ProblemConfig& c, bool force) {
    if (!c.op) bad("operator", "required key is missing");
    if (!c.equation) bad("equation", "required key is missing");
    std::optional<SpectralOperator> op;
    try {
        op = SpectralOperator::assemble(*c.op);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::ZeroEigenvalue) bad("operator", e.what());
        throw;
    }
    Vec f(static_cast<Eigen::Index>(c.equation->initial.size()));
    for (std::size_t i = 0; i < c.equation->initial.size(); ++i) f(static_cast<Eigen::Index>(i)) = c.equation->initial[i];
    CauchyProblem p{std::move(*op), c.function, c.equation->alpha, std::move(f), c.equation->times};
    p.R = c.equation->R;
    p.kappa = c.equation->kappa;
    p.tol = c.tolerances.series;
    p.force = force;
    return p;
}

} // namespace fracevo::config
