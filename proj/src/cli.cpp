#include "pim/cli.hpp"

#include "pim/analysis.hpp"
#include "pim/config.hpp"
#include "pim/csv.hpp"
#include "pim/operators.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace pim {

namespace {

class UsageError : public Error
{
public:
    using Error::Error;
};

/// Everything collected from the command line before the config is built.
struct CommandLine
{
    std::string config_path;
    std::vector<std::string> assignments;
    std::vector<std::pair<std::string, std::string>> flags;
};

void add_common(CLI::App* command, CommandLine& line)
{
    command->add_option("--config", line.config_path, "Flat key = value config file");
    command->add_option("--set", line.assignments, "Override a config key (key=value); repeatable")
        ->allow_extra_args(false);
}

void add_mapped(CLI::App* command, CommandLine& line, const std::string& flag, std::string key, const std::string& help)
{
    command->add_option_function<std::string>(
        flag, [&line, key](const std::string& value) { line.flags.emplace_back(key, value); }, help);
}

void add_manifold_flags(CLI::App* command, CommandLine& line)
{
    add_mapped(command, line, "--shape", "manifold.shape", "interval, rectangle, disk or spherical_cap");
    add_mapped(command, line, "--n", "manifold.n", "Target point count");
    add_mapped(command, line, "--a", "manifold.a", "Interval left end");
    add_mapped(command, line, "--b", "manifold.b", "Interval right end");
    add_mapped(command, line, "--width-x", "manifold.width_x", "Rectangle width");
    add_mapped(command, line, "--width-y", "manifold.width_y", "Rectangle height");
    add_mapped(command, line, "--z0", "manifold.z0", "Cap height, the cap is z >= z0");
    add_mapped(command, line, "--jitter", "manifold.jitter", "Random placement amplitude in [0, 0.5]");
    add_mapped(command, line, "--seed", "seed", "Seed for randomized placement");
}

void add_solver_flags(CLI::App* command, CommandLine& line)
{
    add_mapped(command, line, "--profile", "kernel.profile", "Kernel profile: cubic or truncated_gaussian");
    add_mapped(command, line, "--solver", "solver.method", "auto, dense-lu or iterative");
    add_mapped(command, line, "--tol", "solver.tol", "Relative residual tolerance");
}

void add_coupling_flags(CLI::App* command, CommandLine& line)
{
    add_mapped(command, line, "--t", "kernel.t", "Kernel bandwidth t");
    add_mapped(command, line, "--beta", "robin.beta", "Robin parameter beta");
    add_mapped(command, line, "--c-t", "coupling.c_t", "t = c_t h^gamma_t");
    add_mapped(command, line, "--gamma-t", "coupling.gamma_t", "Exponent gamma_t, below 2/3");
    add_mapped(command, line, "--c-beta", "coupling.c_beta", "beta = c_beta sqrt(t)");
}

Config build_config(const CommandLine& line)
{
    Config config = line.config_path.empty() ? Config{} : Config::load(line.config_path);
    for (const auto& assignment : line.assignments) config.set_assignment(assignment);
    for (const auto& [key, value] : line.flags) config.set(key, value);
    return config;
}

std::string require(const Config& config, const std::string& key, const std::string& flag)
{
    const auto value = config.get(key);
    if (!value || value->empty()) throw UsageError(flag + " is required");
    return *value;
}

void write_solution(const PointCloud& cloud, const DiscreteField& u, const std::string& path)
{
    std::string text;
    for (int c = 0; c < cloud.ambient_dim(); ++c) text += "x" + std::to_string(c + 1) + ",";
    text += "u\n";
    for (Index i = 0; i < cloud.size(); ++i) {
        for (int c = 0; c < cloud.ambient_dim(); ++c) text += csv::format_real(cloud.points()(c, i)) + ",";
        text += csv::format_real(u[i]) + "\n";
    }
    csv::write_file(path, text);
}

void report_guardrails(const GuardrailFlags& flags, std::ostream& err)
{
    for (const auto& message : flags.messages()) err << "warning: " << message << "\n";
}

int cmd_generate(const Config& config, std::ostream& out)
{
    const std::string path = require(config, "out", "--out");
    const PointCloud cloud = generate(manifold_from(config));
    save_cloud(cloud, path);
    out << "wrote " << cloud.size() << " points (" << cloud.boundary_size() << " on the boundary) to " << path << "\n";
    return exit_ok;
}

DiscreteField source_for(const Config& config, const std::optional<ManufacturedCase>& builtin, const PointCloud& cloud)
{
    if (const auto path = config.get("f_file")) {
        Vector f = csv::read_column(*path);
        if (f.size() != cloud.size()) {
            throw ParseError("f file has " + std::to_string(f.size()) + " values, cloud has " +
                             std::to_string(cloud.size()) + " points");
        }
        return f;
    }
    if (config.has("f_value")) return DiscreteField::Constant(cloud.size(), config.get_real("f_value", 0.0));
    if (builtin) return sample_source(*builtin, cloud);
    throw UsageError("a source is required: --case, --f-value or --f-file");
}

Vector boundary_for(const Config& config, const std::optional<ManufacturedCase>& builtin, const PointCloud& cloud)
{
    if (const auto path = config.get("b_file")) {
        const Vector b = csv::read_column(*path);
        if (b.size() == cloud.boundary_size()) return b;
        if (b.size() == cloud.size()) return cloud.boundary_values(b);
        throw ParseError("b file has " + std::to_string(b.size()) + " values, expected " +
                         std::to_string(cloud.boundary_size()) + " boundary or " + std::to_string(cloud.size()) +
                         " point values");
    }
    if (config.has("b_value")) return Vector::Constant(cloud.boundary_size(), config.get_real("b_value", 0.0));
    if (builtin) return sample_boundary(*builtin, cloud);
    throw UsageError("boundary data is required: --case, --b-value or --b-file");
}

int cmd_solve(const Config& config, std::ostream& out, std::ostream& err)
{
    const std::string solution_path = require(config, "out", "--out");
    std::optional<ManufacturedCase> builtin;
    if (const auto name = config.get("case")) builtin = find_case(*name);

    std::optional<PointCloud> loaded;
    if (const auto path = config.get("cloud")) {
        loaded = load_cloud(*path);
    } else if (builtin) {
        loaded = generate(manifold_from(config, builtin->spec));
    } else if (config.has("manifold.shape")) {
        loaded = generate(manifold_from(config));
    } else {
        throw UsageError("a point cloud is required: --cloud, --case or --shape");
    }
    const PointCloud& cloud = *loaded;

    const DiscreteField f = source_for(config, builtin, cloud);
    const Vector b = boundary_for(config, builtin, cloud);
    const PipelineOptions options = pipeline_from(config);
    const double h = cloud.recorded_fill_distance().value_or(fill_distance(cloud));
    const auto [t, beta] = parameters_for(coupling_from(config), h);
    const auto query = config.get("query");
    const auto eval_out = config.get("eval_out");
    if (query.has_value() != eval_out.has_value()) throw UsageError("--query and --eval-out must be given together");

    const Kernel kernel = make_kernel(options.profile, t, cloud.intrinsic_dim());
    const LinearSystem system = assemble(cloud, kernel, beta, f, b, options.assembly);
    if (const auto path = config.get("matrix_out")) write_matrix_market(system, *path);
    const SolveReport result = solve(system, options.solver);
    const GuardrailFlags flags = check_guardrails(h, t, beta, options.guardrails);
    report_guardrails(flags, err);

    write_solution(cloud, result.solution, solution_path);

    std::ostringstream report;
    report << "n = " << cloud.size() << "\n";
    report << "boundary_points = " << cloud.boundary_size() << "\n";
    report << "profile = " << options.profile.name() << "\n";
    report << "h = " << csv::format_real(h) << "\n";
    report << "t = " << csv::format_real(t) << "\n";
    report << "beta = " << csv::format_real(beta) << "\n";
    report << "solver = " << to_string(result.method) << "\n";
    report << "iterations = " << result.iterations << "\n";
    report << "residual = " << csv::format_real(result.residual_norm) << "\n";
    report << "sqrt_t_over_beta = " << csv::format_real(flags.sqrt_t_over_beta) << "\n";
    report << "h_over_t_three_halves = " << csv::format_real(flags.h_over_t_three_halves) << "\n";
    report << "guardrail_beta_violated = " << (flags.beta_violated ? "true" : "false") << "\n";
    report << "guardrail_h_violated = " << (flags.h_violated ? "true" : "false") << "\n";
    if (builtin) {
        double max_error = 0.0;
        for (Index i = 0; i < cloud.size(); ++i) {
            max_error = std::max(max_error, std::abs(result.solution[i] - builtin->exact_u(cloud.point(i))));
        }
        report << "case = " << builtin->name << "\n";
        report << "max_abs_error = " << csv::format_real(max_error) << "\n";
    }
    if (const auto path = config.get("report")) {
        csv::write_file(*path, report.str());
    } else {
        out << report.str();
    }

    if (query) {
        const Interpolant interpolant(cloud, kernel, beta, result.solution, f, b);
        write_evaluations(interpolant, read_query_points(*query, cloud.ambient_dim()), *eval_out);
    }
    return exit_ok;
}

int cmd_sweep(const Config& config, std::ostream& out, std::ostream& err)
{
    const std::string path = require(config, "out", "--out");
    const ManufacturedCase builtin = find_case(require(config, "case", "--case"));
    const auto raw_levels = config.get_integer_list("sweep.levels");
    if (raw_levels.empty()) throw UsageError("--levels is required");
    std::vector<Index> levels(raw_levels.begin(), raw_levels.end());
    const Coupling coupling = coupling_from(config);
    const PipelineOptions options = pipeline_from(config);

    ManufacturedCase c = builtin;
    c.spec = manifold_from(config, builtin.spec);
    if (c.spec.shape != builtin.spec.shape) throw InvalidArgument("case " + c.name + " fixes the manifold shape");

    const SweepResult result = convergence_sweep(c, levels, coupling, options);
    write_sweep_csv(result, path);

    char line[160];
    std::snprintf(line, sizeof line, "%5s %8s %12s %12s %12s %12s %12s %10s\n", "level", "n", "h", "t", "beta",
                  "l2_error", "h1_error", "lemma");
    out << line;
    for (const auto& row : result.rows) {
        std::snprintf(line, sizeof line, "%5d %8lld %12.4e %12.4e %12.4e %12.4e %12.4e %10.4f\n", row.level,
                      static_cast<long long>(row.n), row.h, row.t, row.beta, row.l2_error, row.h1_error,
                      row.lemma ? row.lemma->ratio : 0.0);
        out << line;
        for (const auto& message : row.flags.messages()) err << "warning: level " << row.level << ": " << message << "\n";
    }
    if (result.failure) {
        err << "error: sweep stopped at " << *result.failure << "; partial results written to " << path << "\n";
        return exit_numerical;
    }
    return exit_ok;
}

int cmd_oracle_check(const Config& config, std::ostream& out)
{
    OracleCheckOptions options;
    options.fineness = static_cast<int>(config.get_integer("oracle.fineness", options.fineness));
    options.working_points = config.get_integer("oracle.n", options.working_points);
    options.t = config.get_real("oracle.t", options.t);
    const auto checks = run_oracle_checks(options);

    bool all_passed = true;
    char line[200];
    std::snprintf(line, sizeof line, "%-40s %14s %14s %10s  %s\n", "check", "value", "reference", "tolerance",
                  "result");
    out << line;
    for (const auto& check : checks) {
        std::snprintf(line, sizeof line, "%-40s %14.6e %14.6e %10.2e  %s\n", check.name.c_str(), check.value,
                      check.reference, check.tolerance, check.passed ? "PASS" : "FAIL");
        out << line;
        all_passed = all_passed && check.passed;
    }
    return all_passed ? exit_ok : exit_numerical;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Point cloud Poisson solver", "pim"};
    app.require_subcommand(1);

    CommandLine line;
    auto* generate_cmd = app.add_subcommand("generate", "Sample a built-in manifold into a cloud CSV");
    add_common(generate_cmd, line);
    add_manifold_flags(generate_cmd, line);
    add_mapped(generate_cmd, line, "--out", "out", "Output cloud CSV");

    auto* solve_cmd = app.add_subcommand("solve", "Solve the Poisson problem on a cloud");
    add_common(solve_cmd, line);
    add_manifold_flags(solve_cmd, line);
    add_solver_flags(solve_cmd, line);
    add_coupling_flags(solve_cmd, line);
    add_mapped(solve_cmd, line, "--cloud", "cloud", "Cloud CSV to solve on");
    add_mapped(solve_cmd, line, "--case", "case", "Built-in manufactured case");
    add_mapped(solve_cmd, line, "--f-file", "f_file", "Source values, one per point");
    add_mapped(solve_cmd, line, "--b-file", "b_file", "Boundary values, one per boundary point");
    add_mapped(solve_cmd, line, "--f-value", "f_value", "Constant source");
    add_mapped(solve_cmd, line, "--b-value", "b_value", "Constant boundary value");
    add_mapped(solve_cmd, line, "--out", "out", "Solution CSV");
    add_mapped(solve_cmd, line, "--report", "report", "Run report; printed when omitted");
    add_mapped(solve_cmd, line, "--matrix-out", "matrix_out", "MatrixMarket dump of the system");
    add_mapped(solve_cmd, line, "--query", "query", "Query points for the interpolant");
    add_mapped(solve_cmd, line, "--eval-out", "eval_out", "Interpolant values and gradients at the query points");

    auto* sweep_cmd = app.add_subcommand("sweep", "Convergence sweep of a built-in case");
    add_common(sweep_cmd, line);
    add_manifold_flags(sweep_cmd, line);
    add_solver_flags(sweep_cmd, line);
    add_coupling_flags(sweep_cmd, line);
    add_mapped(sweep_cmd, line, "--case", "case", "Built-in manufactured case");
    add_mapped(sweep_cmd, line, "--levels", "sweep.levels", "Comma separated point counts");
    add_mapped(sweep_cmd, line, "--reference-factor", "sweep.reference_factor", "Reference cloud refinement");
    add_mapped(sweep_cmd, line, "--out", "out", "Sweep CSV");
    sweep_cmd->add_flag_function(
        "--no-time", [&line](std::int64_t) { line.flags.emplace_back("sweep.record_time", "false"); },
        "Write 0 in the wall_time_s column");

    auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare operators against quadrature oracles");
    add_common(oracle_cmd, line);
    add_mapped(oracle_cmd, line, "--fineness", "oracle.fineness", "Oracle cloud refinement factor");
    add_mapped(oracle_cmd, line, "--n", "oracle.n", "Working cloud size");
    add_mapped(oracle_cmd, line, "--t", "oracle.t", "Kernel bandwidth");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        const Config config = build_config(line);
        if (active == generate_cmd) return cmd_generate(config, out);
        if (active == solve_cmd) return cmd_solve(config, out, err);
        if (active == sweep_cmd) return cmd_sweep(config, out, err);
        return cmd_oracle_check(config, out);
    } catch (const UsageError& error) {
        err << "error: " << error.what() << "\n\n" << active->help();
        return exit_usage;
    } catch (const ParseError& error) {
        err << "error: " << error.what() << "\n";
        return exit_input;
    } catch (const InvalidArgument& error) {
        err << "error: " << error.what() << "\n";
        return exit_input;
    } catch (const SingularMatrix& error) {
        err << "error: " << error.what() << "\n";
        return exit_numerical;
    } catch (const NoConvergence& error) {
        err << "error: " << error.what() << "\n";
        return exit_numerical;
    } catch (const OutOfSupport& error) {
        err << "error: " << error.what() << "\n";
        return exit_numerical;
    } catch (const Error& error) {
        err << "error: " << error.what() << "\n";
        return exit_io;
    }
}

} // namespace pim
