#include "pim/solve.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pim;

namespace {

PointCloud cloud_of(Shape shape, Index n)
{
    ManifoldSpec spec;
    spec.shape = shape;
    spec.n = n;
    return generate(spec);
}

LinearSystem interval_system(Index n, double t, double beta, const Vector& f, const Vector& b)
{
    const PointCloud cloud = cloud_of(Shape::interval, n);
    return assemble(cloud, make_kernel(KernelProfile::cubic(), t, 1), beta, f, b);
}

SolveOptions with_method(SolveMethod method)
{
    SolveOptions options;
    options.method = method;
    return options;
}

} // namespace

TEST_CASE("constant boundary data with zero source gives the constant solution")
{
    for (Shape shape : {Shape::interval, Shape::disk, Shape::spherical_cap, Shape::rectangle}) {
        const PointCloud cloud = cloud_of(shape, 700);
        const Kernel kernel = make_kernel(KernelProfile::cubic(), 0.01, cloud.intrinsic_dim());
        const LinearSystem system =
            assemble(cloud, kernel, 0.2, Vector::Zero(cloud.size()), Vector::Constant(cloud.boundary_size(), -1.25));
        for (SolveMethod method : {SolveMethod::dense_lu, SolveMethod::iterative}) {
            const SolveReport report = solve(system, with_method(method));
            CAPTURE(to_string(shape));
            CAPTURE(to_string(method));
            CHECK(report.method == method);
            CHECK((report.solution.array() + 1.25).abs().maxCoeff() <= 1e-10);
            CHECK(report.residual_norm <= 1e-10);
        }
    }
}

TEST_CASE("zero right-hand side gives the zero solution")
{
    const LinearSystem system = interval_system(101, 0.005, 0.1, Vector::Zero(101), Vector::Zero(2));
    for (SolveMethod method : {SolveMethod::dense_lu, SolveMethod::iterative}) {
        const SolveReport report = solve(system, with_method(method));
        CHECK(report.solution.isZero(0.0));
        CHECK(report.residual_norm == 0.0);
    }
}

TEST_CASE("dense LU and GMRES agree on the interval case")
{
    Vector f(101);
    for (Index i = 0; i < 101; ++i) f[i] = std::sin(3.14159 * i / 100.0);
    const LinearSystem system = interval_system(101, 0.004, 0.25, f, Vector::Zero(2));
    const SolveReport lu = solve(system, with_method(SolveMethod::dense_lu));
    const SolveReport gmres = solve(system, with_method(SolveMethod::iterative));
    CHECK((lu.solution - gmres.solution).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(gmres.iterations > 0);
    CHECK(gmres.iterations <= 10 * 101);
}

TEST_CASE("reported residual is recomputed and consistent with the estimate")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const PointCloud cloud = cloud_of(Shape::disk, 1500);
    Vector f(cloud.size());
    for (Index i = 0; i < f.size(); ++i) f[i] = unit(rng);
    const LinearSystem system = assemble(cloud, make_kernel(KernelProfile::cubic(), 0.004, 2), 0.1, f,
                                         Vector::Zero(cloud.boundary_size()));
    CHECK_FALSE(system.is_dense());
    for (SolveMethod method : {SolveMethod::automatic, SolveMethod::dense_lu}) {
        const SolveReport report = solve(system, with_method(method));
        CHECK(report.residual_norm == relative_residual(system, report.solution));
        CHECK(report.residual_norm <= 1e-10);
        CHECK(report.residual_norm <= 10.0 * report.estimated_residual + 1e-14);
        CHECK(report.estimated_residual <= 10.0 * report.residual_norm + 1e-14);
    }
    CHECK(solve(system).method == SolveMethod::iterative);
}

TEST_CASE("solves are deterministic")
{
    const PointCloud cloud = cloud_of(Shape::spherical_cap, 900);
    Vector f(cloud.size());
    for (Index i = 0; i < f.size(); ++i) f[i] = 2.0 * cloud.point(i)[2];
    const LinearSystem system = assemble(cloud, make_kernel(KernelProfile::cubic(), 0.01, 2), 0.1, f,
                                         Vector::Zero(cloud.boundary_size()));
    for (SolveMethod method : {SolveMethod::dense_lu, SolveMethod::iterative}) {
        const SolveReport first = solve(system, with_method(method));
        const SolveReport second = solve(system, with_method(method));
        CHECK(first.solution == second.solution);
        CHECK(first.iterations == second.iterations);
    }
}

TEST_CASE("singular matrices are reported")
{
    LinearSystem system;
    Matrix matrix = Matrix::Identity(4, 4);
    matrix.row(2).setZero();
    system.matrix = matrix;
    system.rhs = Vector::Ones(4);
    CHECK_THROWS_AS(solve(system, with_method(SolveMethod::dense_lu)), SingularMatrix);
    CHECK_THROWS_AS(solve(system, with_method(SolveMethod::iterative)), SingularMatrix);
}

TEST_CASE("iteration cap and unreachable tolerance are reported")
{
    Vector f = Vector::Ones(801);
    const LinearSystem system = interval_system(801, 0.002, 0.05, f, Vector::Zero(2));
    SolveOptions capped = with_method(SolveMethod::iterative);
    capped.max_iter_factor = 0.005;
    CHECK_THROWS_AS(solve(system, capped), NoConvergence);
    try {
        solve(system, capped);
    } catch (const NoConvergence& error) {
        CHECK(std::string(error.what()).find("iterations") != std::string::npos);
    }
    SolveOptions strict = with_method(SolveMethod::iterative);
    strict.tol = 1e-30;
    CHECK_THROWS_AS(solve(system, strict), NoConvergence);
}

TEST_CASE("mismatched sizes are rejected")
{
    LinearSystem system;
    system.matrix = Matrix::Identity(3, 3);
    system.rhs = Vector::Ones(4);
    CHECK_THROWS_AS(solve(system), InvalidArgument);
}

TEST_CASE("solver method names")
{
    CHECK(parse_solve_method("auto") == SolveMethod::automatic);
    CHECK(parse_solve_method("dense-lu") == SolveMethod::dense_lu);
    CHECK(parse_solve_method("iterative") == SolveMethod::iterative);
    CHECK_THROWS_AS(parse_solve_method("cholesky"), InvalidArgument);
    CHECK(to_string(SolveMethod::dense_lu) == "dense-lu");
}

TEST_CASE("guardrail flags")
{
    const GuardrailFlags fine = check_guardrails(0.001, 0.01, 0.2);
    CHECK(fine.sqrt_t_over_beta == doctest::Approx(0.5));
    CHECK(fine.h_over_t_three_halves == doctest::Approx(1.0));
    CHECK_FALSE(fine.any());
    CHECK(fine.messages().empty());

    const GuardrailFlags small_beta = check_guardrails(0.001, 0.01, 0.05);
    CHECK(small_beta.beta_violated);
    CHECK_FALSE(small_beta.h_violated);
    CHECK(small_beta.messages().size() == 1);

    GuardrailThresholds tight;
    tight.h_over_t_three_halves = 0.5;
    const GuardrailFlags coarse = check_guardrails(0.001, 0.01, 0.2, tight);
    CHECK(coarse.h_violated);
    CHECK(coarse.any());
}
