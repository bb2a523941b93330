#pragma once

#include "pim/assembly.hpp"
#include "pim/interpolate.hpp"
#include "pim/solve.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pim {

using ScalarField = std::function<double(const ConstVectorRef&)>;
using VectorField = std::function<Vector(const ConstVectorRef&)>;

///
/// Closed-form solution u of -Lap_M u = f on a built-in manifold with
/// boundary data b = u on the boundary. `exact_grad` is the tangential
/// gradient.
///
struct ManufacturedCase
{
    std::string name;
    ManifoldSpec spec;
    ScalarField exact_u;
    VectorField exact_grad;
    ScalarField source;
    ScalarField boundary;
    /// b = 0 identically.
    bool homogeneous = false;
};

/// interval_sine, disk_paraboloid, rectangle_quadratic, cap_linear.
std::vector<ManufacturedCase> builtin_cases();
/// Looks a case up by name; throws InvalidArgument for unknown names.
ManufacturedCase find_case(std::string_view name);

/// f sampled at every point and b at every boundary point of `cloud`.
DiscreteField sample_source(const ManufacturedCase& c, const PointCloud& cloud);
Vector sample_boundary(const ManufacturedCase& c, const PointCloud& cloud);

struct ErrorNorms
{
    double l2 = 0.0;
    double h1 = 0.0;
    double boundary_l2 = 0.0;
    /// ||u||_{L2} on the reference cloud, for relative errors.
    double exact_l2 = 0.0;
};

/// Value and tangent gradient of an approximate solution at a point.
using FieldEvaluator = std::function<std::pair<double, Vector>(const ConstVectorRef&)>;

/// All error norms of `approx` against the exact solution, by quadrature on
/// `reference` (a cloud at least four times finer).
ErrorNorms error_norms(const FieldEvaluator& approx, const ManufacturedCase& c, const PointCloud& reference);
ErrorNorms error_norms(const Interpolant& interpolant, const ManufacturedCase& c, const PointCloud& reference);
double l2_error(const Interpolant& interpolant, const ManufacturedCase& c, const PointCloud& reference);
double h1_error(const Interpolant& interpolant, const ManufacturedCase& c, const PointCloud& reference);

/// Both sides of the discrete-to-continuous norm bound for a homogeneous solve:
///   lhs = (sum u_i^2 V_i)^(1/2) + t^(1/4) (sum_l u_l^2 A_l)^(1/2)
///   rhs = ||I||_{H1} + sqrt(h) t^(3/4) ||f||_inf
struct LemmaNormRecord
{
    double volume_norm = 0.0;
    double boundary_norm = 0.0;
    double lhs = 0.0;
    double interpolant_h1 = 0.0;
    double forcing = 0.0;
    double rhs = 0.0;
    /// lhs / rhs, or 0 when both vanish.
    double ratio = 0.0;
};

LemmaNormRecord lemma_norm_check(const Interpolant& interpolant,
                                 const DiscreteField& u,
                                 const PointCloud& reference,
                                 double h);

/// t = c_t h^gamma_t and beta = c_beta sqrt(t). gamma_t < 2/3 keeps h/t^(3/2) -> 0.
struct PowerCoupling
{
    double c_t = 0.1;
    double gamma_t = 4.0 / 7.0;
    double c_beta = 1.0;
};

struct FixedParameters
{
    double t = 0.0;
    double beta = 0.0;
};

using Coupling = std::variant<PowerCoupling, FixedParameters>;

/// Throws InvalidArgument when gamma_t >= 2/3 or a coefficient is not positive.
void validate(const Coupling& coupling);
/// (t, beta) for fill distance h.
std::pair<double, double> parameters_for(const Coupling& coupling, double h);

struct PipelineOptions
{
    KernelProfile profile = KernelProfile::cubic();
    AssemblyOptions assembly;
    SolveOptions solver;
    GuardrailThresholds guardrails;
    /// Reference cloud resolution relative to the solve cloud.
    int reference_factor = 4;
    /// Write measured wall time; 0 keeps sweep CSVs bit-reproducible.
    bool record_time = true;
};

/// Discrete solve of one case on one cloud.
struct CaseSolution
{
    Interpolant interpolant;
    SolveReport report;
    double h = 0.0;
    GuardrailFlags flags;
};

CaseSolution solve_case(const ManufacturedCase& c,
                        const PointCloud& cloud,
                        double t,
                        double beta,
                        const PipelineOptions& options = {});

struct SweepRow
{
    int level = 0;
    Index n = 0;
    double h = 0.0;
    double t = 0.0;
    double beta = 0.0;
    double l2_error = 0.0;
    double h1_error = 0.0;
    double boundary_l2_error = 0.0;
    double residual = 0.0;
    double wall_time = 0.0;
    double relative_l2_error = 0.0;
    GuardrailFlags flags;
    std::optional<LemmaNormRecord> lemma;
};

struct SweepResult
{
    std::vector<SweepRow> rows;
    /// Set when a level failed; rows before it are kept.
    std::optional<std::string> failure;
};

/// Solves `c` at each resolution in `levels` (target point counts), with
/// (t, beta) from `coupling`, and measures errors on refined reference clouds.
SweepResult convergence_sweep(const ManufacturedCase& c,
                              std::span<const Index> levels,
                              const Coupling& coupling,
                              const PipelineOptions& options = {});

/// Header `level,n,h,t,beta,l2_error,h1_error,boundary_l2_error,residual,wall_time_s`.
std::string format_sweep_csv(const SweepResult& result);
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
std::vector<SweepRow> parse_sweep_csv(std::string_view text);

struct RobinGapRow
{
    double beta = 0.0;
    double l2_error = 0.0;
    double h1_error = 0.0;
    double boundary_l2_error = 0.0;
    GuardrailFlags flags;
};

/// Fixed t and resolution, decreasing beta sequence.
std::vector<RobinGapRow> robin_gap_study(const ManufacturedCase& c,
                                         double t,
                                         Index n,
                                         std::span<const double> betas,
                                         const PipelineOptions& options = {});

/// Header `beta,l2_error,h1_error,boundary_l2_error,flagged`.
std::string format_robin_csv(const std::vector<RobinGapRow>& rows);

} // namespace pim
