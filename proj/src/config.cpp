#include "pim/config.hpp"

#include "pim/csv.hpp"

#include <algorithm>

namespace pim {

const std::vector<std::string_view>& known_config_keys()
{
    static const std::vector<std::string_view> keys = {
        "manifold.shape",        "manifold.n",
        "manifold.a",            "manifold.b",
        "manifold.width_x",      "manifold.width_y",
        "manifold.z0",           "manifold.jitter",
        "seed",                  "kernel.profile",
        "kernel.t",              "robin.beta",
        "coupling.c_t",          "coupling.gamma_t",
        "coupling.c_beta",       "solver.method",
        "solver.tol",            "solver.max_iter_factor",
        "solver.restart",        "solver.dense_threshold",
        "assembly.storage",      "assembly.dense_threshold",
        "guardrail.sqrt_t_over_beta", "guardrail.h_over_t_three_halves",
        "sweep.levels",          "sweep.reference_factor",
        "sweep.record_time",     "case",
        "cloud",                 "out",
        "f_file",                "b_file",
        "f_value",               "b_value",
        "report",                "matrix_out",
        "query",                 "eval_out",
        "oracle.fineness",       "oracle.n",
        "oracle.t",
    };
    return keys;
}

Config Config::parse(std::string_view text)
{
    Config config;
    Index line_number = 0;
    for (auto raw : csv::lines(text)) {
        ++line_number;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = csv::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("config line " + std::to_string(line_number) + ": expected key = value");
        }
        try {
            config.set(std::string(csv::trim(line.substr(0, eq))), std::string(csv::trim(line.substr(eq + 1))));
        } catch (const ParseError& error) {
            throw ParseError("config line " + std::to_string(line_number) + ": " + error.what());
        }
    }
    return config;
}

Config Config::load(const std::filesystem::path& path)
{
    return parse(csv::read_file(path));
}

void Config::set(const std::string& key, const std::string& value)
{
    const auto& keys = known_config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ParseError("unknown config key '" + key + "'");
    m_values[key] = value;
}

void Config::set_assignment(std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value, got '" + std::string(assignment) + "'");
    set(std::string(csv::trim(assignment.substr(0, eq))), std::string(csv::trim(assignment.substr(eq + 1))));
}

std::optional<std::string> Config::get(const std::string& key) const
{
    const auto it = m_values.find(key);
    if (it == m_values.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const
{
    return get(key).value_or(fallback);
}

double Config::get_real(const std::string& key, double fallback) const
{
    const auto value = get(key);
    return value ? csv::parse_real(*value, key) : fallback;
}

long long Config::get_integer(const std::string& key, long long fallback) const
{
    const auto value = get(key);
    return value ? csv::parse_integer(*value, key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    const auto value = get(key);
    if (!value) return fallback;
    if (*value == "true" || *value == "1" || *value == "yes" || *value == "on") return true;
    if (*value == "false" || *value == "0" || *value == "no" || *value == "off") return false;
    throw ParseError("invalid boolean '" + *value + "' for " + key);
}

namespace {

std::vector<std::string> list_items(const std::string& value)
{
    std::vector<std::string> items;
    std::string current;
    for (char ch : value) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!current.empty()) items.push_back(std::move(current));
            current.clear();
        } else {
            current += ch;
        }
    }
    if (!current.empty()) items.push_back(std::move(current));
    return items;
}

} // namespace

std::vector<long long> Config::get_integer_list(const std::string& key) const
{
    std::vector<long long> out;
    if (const auto value = get(key)) {
        for (const auto& item : list_items(*value)) out.push_back(csv::parse_integer(item, key));
    }
    return out;
}

std::vector<double> Config::get_real_list(const std::string& key) const
{
    std::vector<double> out;
    if (const auto value = get(key)) {
        for (const auto& item : list_items(*value)) out.push_back(csv::parse_real(item, key));
    }
    return out;
}

ManifoldSpec manifold_from(const Config& config, const ManifoldSpec& defaults)
{
    ManifoldSpec spec = defaults;
    if (const auto shape = config.get("manifold.shape")) spec.shape = parse_shape(*shape);
    spec.n = config.get_integer("manifold.n", spec.n);
    spec.a = config.get_real("manifold.a", spec.a);
    spec.b = config.get_real("manifold.b", spec.b);
    spec.width_x = config.get_real("manifold.width_x", spec.width_x);
    spec.width_y = config.get_real("manifold.width_y", spec.width_y);
    spec.z0 = config.get_real("manifold.z0", spec.z0);
    spec.jitter = config.get_real("manifold.jitter", spec.jitter);
    const long long seed = config.get_integer("seed", static_cast<long long>(spec.seed));
    if (seed < 0) throw ParseError("seed must be nonnegative");
    spec.seed = static_cast<std::uint64_t>(seed);
    validate(spec);
    return spec;
}

PipelineOptions pipeline_from(const Config& config)
{
    PipelineOptions options;
    options.profile = KernelProfile::from_name(config.get_string("kernel.profile", "cubic"));

    auto& solver = options.solver;
    if (const auto method = config.get("solver.method")) solver.method = parse_solve_method(*method);
    solver.tol = config.get_real("solver.tol", solver.tol);
    solver.max_iter_factor = config.get_real("solver.max_iter_factor", solver.max_iter_factor);
    solver.restart = static_cast<int>(config.get_integer("solver.restart", solver.restart));
    solver.dense_threshold = config.get_integer("solver.dense_threshold", solver.dense_threshold);
    if (!(solver.tol > 0.0)) throw InvalidArgument("solver.tol must be positive");
    if (!(solver.max_iter_factor > 0.0)) throw InvalidArgument("solver.max_iter_factor must be positive");
    if (solver.restart < 1) throw InvalidArgument("solver.restart must be at least 1");

    auto& assembly = options.assembly;
    if (const auto storage = config.get("assembly.storage")) {
        if (*storage == "auto") assembly.storage = Storage::automatic;
        else if (*storage == "dense") assembly.storage = Storage::dense;
        else if (*storage == "sparse") assembly.storage = Storage::sparse;
        else throw ParseError("assembly.storage must be auto, dense or sparse");
    }
    assembly.dense_threshold = config.get_integer("assembly.dense_threshold", assembly.dense_threshold);

    options.guardrails.sqrt_t_over_beta =
        config.get_real("guardrail.sqrt_t_over_beta", options.guardrails.sqrt_t_over_beta);
    options.guardrails.h_over_t_three_halves =
        config.get_real("guardrail.h_over_t_three_halves", options.guardrails.h_over_t_three_halves);

    options.reference_factor = static_cast<int>(config.get_integer("sweep.reference_factor", options.reference_factor));
    if (options.reference_factor < 1) throw InvalidArgument("sweep.reference_factor must be at least 1");
    options.record_time = config.get_bool("sweep.record_time", options.record_time);
    return options;
}

Coupling coupling_from(const Config& config)
{
    const bool explicit_t = config.has("kernel.t");
    const bool explicit_beta = config.has("robin.beta");
    const bool coupled = config.has("coupling.c_t") || config.has("coupling.gamma_t") || config.has("coupling.c_beta");
    if ((explicit_t || explicit_beta) && coupled) {
        throw InvalidArgument("give either kernel.t and robin.beta or coupling.*, not both");
    }
    Coupling coupling;
    if (explicit_t || explicit_beta) {
        if (!(explicit_t && explicit_beta)) throw InvalidArgument("kernel.t and robin.beta must be given together");
        coupling = FixedParameters{config.get_real("kernel.t", 0.0), config.get_real("robin.beta", 0.0)};
    } else {
        PowerCoupling power;
        power.c_t = config.get_real("coupling.c_t", power.c_t);
        power.gamma_t = config.get_real("coupling.gamma_t", power.gamma_t);
        power.c_beta = config.get_real("coupling.c_beta", power.c_beta);
        coupling = power;
    }
    validate(coupling);
    return coupling;
}

} // namespace pim
