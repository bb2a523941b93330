#include "pim/analysis.hpp"

#include "pim/csv.hpp"
#include "pim/parallel.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

namespace pim {

namespace {

constexpr double pi = std::numbers::pi;

ManufacturedCase interval_sine()
{
    ManufacturedCase c;
    c.name = "interval_sine";
    c.spec.shape = Shape::interval;
    c.spec.n = 101;
    c.exact_u = [](const ConstVectorRef& x) { return std::sin(pi * x[0]); };
    c.exact_grad = [](const ConstVectorRef& x) {
        Vector g(1);
        g[0] = pi * std::cos(pi * x[0]);
        return g;
    };
    c.source = [](const ConstVectorRef& x) { return pi * pi * std::sin(pi * x[0]); };
    c.boundary = [](const ConstVectorRef&) { return 0.0; };
    c.homogeneous = true;
    return c;
}

ManufacturedCase disk_paraboloid()
{
    ManufacturedCase c;
    c.name = "disk_paraboloid";
    c.spec.shape = Shape::disk;
    c.spec.n = 2000;
    c.exact_u = [](const ConstVectorRef& x) { return 1.0 - x.squaredNorm(); };
    c.exact_grad = [](const ConstVectorRef& x) { return Vector(-2.0 * x); };
    c.source = [](const ConstVectorRef&) { return 4.0; };
    c.boundary = [](const ConstVectorRef&) { return 0.0; };
    c.homogeneous = true;
    return c;
}

ManufacturedCase rectangle_quadratic()
{
    ManufacturedCase c;
    c.name = "rectangle_quadratic";
    c.spec.shape = Shape::rectangle;
    c.spec.n = 1024;
    c.exact_u = [](const ConstVectorRef& x) { return x.squaredNorm(); };
    c.exact_grad = [](const ConstVectorRef& x) { return Vector(2.0 * x); };
    c.source = [](const ConstVectorRef&) { return -4.0; };
    c.boundary = [](const ConstVectorRef& x) { return x.squaredNorm(); };
    return c;
}

ManufacturedCase cap_linear()
{
    ManufacturedCase c;
    c.name = "cap_linear";
    c.spec.shape = Shape::spherical_cap;
    c.spec.z0 = 0.0;
    c.spec.n = 2000;
    c.exact_u = [](const ConstVectorRef& x) { return x[2]; };
    // Tangential part of e_z on the unit sphere.
    c.exact_grad = [](const ConstVectorRef& x) {
        Vector g = -(x[2] / x.squaredNorm()) * x;
        g[2] += 1.0;
        return g;
    };
    c.source = [](const ConstVectorRef& x) { return 2.0 * x[2]; };
    const double z0 = c.spec.z0;
    c.boundary = [z0](const ConstVectorRef&) { return z0; };
    c.homogeneous = z0 == 0.0;
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

std::vector<ManufacturedCase> builtin_cases()
{
    return {interval_sine(), disk_paraboloid(), rectangle_quadratic(), cap_linear()};
}

ManufacturedCase find_case(std::string_view name)
{
    for (auto& c : builtin_cases()) {
        if (c.name == name) return c;
    }
    throw InvalidArgument("unknown case '" + std::string(name) +
                          "' (expected interval_sine, disk_paraboloid, rectangle_quadratic or cap_linear)");
}

DiscreteField sample_source(const ManufacturedCase& c, const PointCloud& cloud)
{
    DiscreteField f(cloud.size());
    for (Index i = 0; i < cloud.size(); ++i) f[i] = c.source(cloud.point(i));
    return f;
}

Vector sample_boundary(const ManufacturedCase& c, const PointCloud& cloud)
{
    Vector b(cloud.boundary_size());
    for (Index l = 0; l < cloud.boundary_size(); ++l) b[l] = c.boundary(cloud.point(cloud.boundary_indices()[l]));
    return b;
}

ErrorNorms error_norms(const FieldEvaluator& approx, const ManufacturedCase& c, const PointCloud& reference)
{
    const Index n = reference.size();
    Vector value_error(n), grad_error(n), exact(n);
    parallel_for(n, [&](Index q) {
        const auto x = reference.point(q);
        const auto [value, gradient] = approx(x);
        const double u = c.exact_u(x);
        value_error[q] = (u - value) * (u - value);
        grad_error[q] = (c.exact_grad(x) - gradient).squaredNorm();
        exact[q] = u * u;
    });

    // Sequential sums keep the result independent of the worker count.
    const Vector& W = reference.volume_weights();
    double l2 = 0.0, grad = 0.0, exact_l2 = 0.0;
    for (Index q = 0; q < n; ++q) {
        l2 += value_error[q] * W[q];
        grad += grad_error[q] * W[q];
        exact_l2 += exact[q] * W[q];
    }
    double boundary = 0.0;
    for (Index l = 0; l < reference.boundary_size(); ++l) {
        boundary += value_error[reference.boundary_indices()[l]] * reference.area_weights()[l];
    }

    ErrorNorms norms;
    norms.l2 = std::sqrt(l2);
    norms.h1 = std::sqrt(l2 + grad);
    norms.boundary_l2 = std::sqrt(boundary);
    norms.exact_l2 = std::sqrt(exact_l2);
    return norms;
}

ErrorNorms error_norms(const Interpolant& interpolant, const ManufacturedCase& c, const PointCloud& reference)
{
    return error_norms([&](const ConstVectorRef& x) { return interpolant.eval_with_grad(x); }, c, reference);
}

double l2_error(const Interpolant& interpolant, const ManufacturedCase& c, const PointCloud& reference)
{
    return error_norms(interpolant, c, reference).l2;
}

double h1_error(const Interpolant& interpolant, const ManufacturedCase& c, const PointCloud& reference)
{
    return error_norms(interpolant, c, reference).h1;
}

LemmaNormRecord lemma_norm_check(const Interpolant& interpolant,
                                 const DiscreteField& u,
                                 const PointCloud& reference,
                                 double h)
{
    const PointCloud& cloud = interpolant.cloud();
    if (u.size() != cloud.size()) throw InvalidArgument("u must match the cloud size");
    const double t = interpolant.kernel().t();

    LemmaNormRecord record;
    double volume = 0.0;
    for (Index i = 0; i < cloud.size(); ++i) volume += u[i] * u[i] * cloud.volume_weights()[i];
    double boundary = 0.0;
    for (Index l = 0; l < cloud.boundary_size(); ++l) {
        const double ul = u[cloud.boundary_indices()[l]];
        boundary += ul * ul * cloud.area_weights()[l];
    }
    record.volume_norm = std::sqrt(volume);
    record.boundary_norm = std::sqrt(boundary);
    record.lhs = record.volume_norm + std::pow(t, 0.25) * record.boundary_norm;

    const Index n = reference.size();
    Vector h1_terms(n);
    parallel_for(n, [&](Index q) {
        const auto [value, gradient] = interpolant.eval_with_grad(reference.point(q));
        h1_terms[q] = value * value + gradient.squaredNorm();
    });
    double h1 = 0.0;
    for (Index q = 0; q < n; ++q) h1 += h1_terms[q] * reference.volume_weights()[q];
    record.interpolant_h1 = std::sqrt(h1);

    const double f_max = interpolant.f().size() > 0 ? interpolant.f().cwiseAbs().maxCoeff() : 0.0;
    record.forcing = std::sqrt(h) * std::pow(t, 0.75) * f_max;
    record.rhs = record.interpolant_h1 + record.forcing;
    record.ratio = record.rhs > 0.0 ? record.lhs / record.rhs : (record.lhs > 0.0 ? INFINITY : 0.0);
    return record;
}

void validate(const Coupling& coupling)
{
    if (const auto* power = std::get_if<PowerCoupling>(&coupling)) {
        if (!(power->c_t > 0.0)) throw InvalidArgument("coupling.c_t must be positive");
        if (!(power->c_beta > 0.0)) throw InvalidArgument("coupling.c_beta must be positive");
        if (!(power->gamma_t > 0.0)) throw InvalidArgument("coupling.gamma_t must be positive");
        if (!(power->gamma_t < 2.0 / 3.0)) {
            throw InvalidArgument("coupling.gamma_t = " + csv::format_real(power->gamma_t) +
                                  " must be below 2/3: with t = c_t h^gamma_t the ratio h/t^(3/2) grows like "
                                  "h^(1 - 3 gamma_t / 2) and would not vanish as h -> 0");
        }
        return;
    }
    const auto& fixed = std::get<FixedParameters>(coupling);
    if (!(fixed.t > 0.0)) throw InvalidArgument("t must be positive");
    if (!(fixed.beta > 0.0)) throw InvalidArgument("beta must be positive");
}

std::pair<double, double> parameters_for(const Coupling& coupling, double h)
{
    if (const auto* power = std::get_if<PowerCoupling>(&coupling)) {
        const double t = power->c_t * std::pow(h, power->gamma_t);
        return {t, power->c_beta * std::sqrt(t)};
    }
    const auto& fixed = std::get<FixedParameters>(coupling);
    return {fixed.t, fixed.beta};
}

CaseSolution solve_case(const ManufacturedCase& c,
                        const PointCloud& cloud,
                        double t,
                        double beta,
                        const PipelineOptions& options)
{
    const Kernel kernel = make_kernel(options.profile, t, cloud.intrinsic_dim());
    DiscreteField f = sample_source(c, cloud);
    Vector b = sample_boundary(c, cloud);
    const LinearSystem system = assemble(cloud, kernel, beta, f, b, options.assembly);
    SolveReport report = solve(system, options.solver);
    const double h = system.metadata.h > 0.0 ? system.metadata.h : fill_distance(cloud);
    DiscreteField u = report.solution;
    return CaseSolution{Interpolant(cloud, kernel, beta, std::move(u), std::move(f), std::move(b)),
                        std::move(report),
                        h,
                        check_guardrails(h, t, beta, options.guardrails)};
}

SweepResult convergence_sweep(const ManufacturedCase& c,
                              std::span<const Index> levels,
                              const Coupling& coupling,
                              const PipelineOptions& options)
{
    validate(coupling);
    if (levels.empty()) throw InvalidArgument("a sweep needs at least one level");
    if (options.reference_factor < 1) throw InvalidArgument("reference factor must be at least 1");

    SweepResult result;
    for (size_t level = 0; level < levels.size(); ++level) {
        const auto start = std::chrono::steady_clock::now();
        try {
            ManifoldSpec spec = c.spec;
            spec.n = levels[level];
            const PointCloud cloud = generate(spec);
            const double h = cloud.recorded_fill_distance().value_or(fill_distance(cloud));
            const auto [t, beta] = parameters_for(coupling, h);
            const CaseSolution solution = solve_case(c, cloud, t, beta, options);
            const PointCloud reference = generate(refined(spec, options.reference_factor));
            const ErrorNorms norms = error_norms(solution.interpolant, c, reference);

            SweepRow row;
            row.level = static_cast<int>(level) + 1;
            row.n = cloud.size();
            row.h = h;
            row.t = t;
            row.beta = beta;
            row.l2_error = norms.l2;
            row.h1_error = norms.h1;
            row.boundary_l2_error = norms.boundary_l2;
            row.residual = solution.report.residual_norm;
            row.relative_l2_error = norms.exact_l2 > 0.0 ? norms.l2 / norms.exact_l2 : norms.l2;
            row.flags = solution.flags;
            if (c.homogeneous) row.lemma = lemma_norm_check(solution.interpolant, solution.report.solution, reference, h);
            row.wall_time = options.record_time ? seconds_since(start) : 0.0;
            result.rows.push_back(std::move(row));
        } catch (const Error& error) {
            result.failure = "level " + std::to_string(level + 1) + " (n = " + std::to_string(levels[level]) +
                             "): " + error.what();
            break;
        }
    }
    return result;
}

std::string format_sweep_csv(const SweepResult& result)
{
    std::string out = "level,n,h,t,beta,l2_error,h1_error,boundary_l2_error,residual,wall_time_s\n";
    for (const auto& row : result.rows) {
        out += std::to_string(row.level) + "," + std::to_string(row.n);
        for (double value : {row.h, row.t, row.beta, row.l2_error, row.h1_error, row.boundary_l2_error, row.residual,
                             row.wall_time}) {
            out += "," + csv::format_real(value);
        }
        out += "\n";
    }
    return out;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path)
{
    csv::write_file(path, format_sweep_csv(result));
}

std::vector<SweepRow> parse_sweep_csv(std::string_view text)
{
    std::vector<SweepRow> rows;
    bool header_seen = false;
    Index line_number = 0;
    for (auto raw : csv::lines(text)) {
        ++line_number;
        const auto line = csv::trim(raw);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "level,n,h,t,beta,l2_error,h1_error,boundary_l2_error,residual,wall_time_s") {
                throw ParseError("unexpected sweep CSV header");
            }
            header_seen = true;
            continue;
        }
        const auto fields = csv::split(line);
        if (fields.size() != 10) {
            throw ParseError("sweep CSV line " + std::to_string(line_number) + " needs 10 fields");
        }
        SweepRow row;
        row.level = static_cast<int>(csv::parse_integer(fields[0], "level"));
        row.n = csv::parse_integer(fields[1], "n");
        row.h = csv::parse_real(fields[2], "h");
        row.t = csv::parse_real(fields[3], "t");
        row.beta = csv::parse_real(fields[4], "beta");
        row.l2_error = csv::parse_real(fields[5], "l2_error");
        row.h1_error = csv::parse_real(fields[6], "h1_error");
        row.boundary_l2_error = csv::parse_real(fields[7], "boundary_l2_error");
        row.residual = csv::parse_real(fields[8], "residual");
        row.wall_time = csv::parse_real(fields[9], "wall_time_s");
        rows.push_back(row);
    }
    if (!header_seen) throw ParseError("empty sweep CSV");
    return rows;
}

std::vector<RobinGapRow> robin_gap_study(const ManufacturedCase& c,
                                         double t,
                                         Index n,
                                         std::span<const double> betas,
                                         const PipelineOptions& options)
{
    if (betas.empty()) throw InvalidArgument("beta sequence is empty");
    for (size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0)) throw InvalidArgument("beta values must be positive");
        if (i > 0 && !(betas[i] < betas[i - 1])) throw InvalidArgument("beta sequence must be strictly decreasing");
    }
    ManifoldSpec spec = c.spec;
    spec.n = n;
    const PointCloud cloud = generate(spec);
    const PointCloud reference = generate(refined(spec, options.reference_factor));

    std::vector<RobinGapRow> rows;
    for (double beta : betas) {
        const CaseSolution solution = solve_case(c, cloud, t, beta, options);
        const ErrorNorms norms = error_norms(solution.interpolant, c, reference);
        rows.push_back({beta, norms.l2, norms.h1, norms.boundary_l2, solution.flags});
    }
    return rows;
}

std::string format_robin_csv(const std::vector<RobinGapRow>& rows)
{
    std::string out = "beta,l2_error,h1_error,boundary_l2_error,flagged\n";
    for (const auto& row : rows) {
        out += csv::format_real(row.beta) + "," + csv::format_real(row.l2_error) + "," +
               csv::format_real(row.h1_error) + "," + csv::format_real(row.boundary_l2_error) + "," +
               (row.flags.any() ? "1" : "0") + "\n";
    }
    return out;
}

} // namespace pim
