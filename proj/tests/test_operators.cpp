#include "pim/operators.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace pim;
using std::numbers::pi;

namespace {

PointCloud cloud_of(Shape shape, Index n, double jitter = 0.0)
{
    ManifoldSpec spec;
    spec.shape = shape;
    spec.n = n;
    spec.jitter = jitter;
    spec.seed = 21;
    return generate(spec);
}

Vector random_field(Index n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vector u(n);
    for (Index i = 0; i < n; ++i) u[i] = unit(rng);
    return u;
}

} // namespace

TEST_CASE("L_th annihilates constants exactly")
{
    for (Shape shape : {Shape::interval, Shape::disk, Shape::spherical_cap}) {
        const PointCloud cloud = cloud_of(shape, 300, 0.3);
        const Kernel kernel = make_kernel(KernelProfile::cubic(), 0.02, cloud.intrinsic_dim());
        const Vector u = Vector::Constant(cloud.size(), -2.75);
        for (Index i = 0; i < cloud.size(); ++i) CHECK(apply_Lth(cloud, kernel, u, i) == 0.0);
    }
}

TEST_CASE("two-point cloud by hand")
{
    PointMatrix points(1, 2);
    points << 0.0, 0.1;
    const PointCloud cloud(points, 1, {0, 1}, Vector::Constant(2, 0.5), Vector::Ones(2));
    const Kernel kernel = make_kernel(KernelProfile::cubic(), 0.01, 1);
    Vector u(2);
    u << 1.0, 0.0;
    const double expected = (1.0 / 0.01) * std::pow(0.04 * pi, -0.5) * 0.421875 * 0.5;
    CHECK(apply_Lth(cloud, kernel, u, 0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(apply_Lth(cloud, kernel, u, 0) == doctest::Approx(59.51).epsilon(1e-3));
    CHECK(apply_Lth(cloud, kernel, u, 1) == doctest::Approx(-expected).epsilon(1e-14));
}

TEST_CASE("L_th is linear")
{
    std::mt19937_64 rng(4);
    const PointCloud cloud = cloud_of(Shape::disk, 400);
    const Kernel kernel = make_kernel(KernelProfile::cubic(), 0.01, 2);
    const Vector u = random_field(cloud.size(), rng);
    const Vector w = random_field(cloud.size(), rng);
    for (Index i = 0; i < cloud.size(); i += 7) {
        CHECK(apply_Lth(cloud, kernel, Vector(-u), i) == -apply_Lth(cloud, kernel, u, i));
        const double sum = apply_Lth(cloud, kernel, u, i) + apply_Lth(cloud, kernel, w, i);
        CHECK(apply_Lth(cloud, kernel, Vector(u + w), i) == doctest::Approx(sum).epsilon(1e-12).scale(100.0));
    }
}

TEST_CASE("K_th on zero and constant fields")
{
    const PointCloud cloud = cloud_of(Shape::interval, 101);
    const Kernel kernel = make_kernel(KernelProfile::cubic(), 0.004, 1);
    const double beta = 0.2;
    const Vector zero = Vector::Zero(cloud.size());
    const Vector constant = Vector::Constant(cloud.size(), 1.5);
    for (Index i = 0; i < cloud.size(); ++i) {
        CHECK(apply_Kth(cloud, kernel, beta, zero, i) == 0.0);
        double sum = 0.0;
        for (Index l = 0; l < cloud.boundary_size(); ++l) {
            sum += eval_Rbar_t(cloud.point(i), cloud.point(cloud.boundary_indices()[l]), kernel.params, kernel.profile) *
                   cloud.area_weights()[l];
        }
        CHECK(apply_Kth(cloud, kernel, beta, constant, i) == doctest::Approx(2.0 * 1.5 / beta * sum).epsilon(1e-14));
    }
}

TEST_CASE("K_th equals L_th plus a separately summed boundary term")
{
    std::mt19937_64 rng(5);
    for (Shape shape : {Shape::interval, Shape::rectangle, Shape::disk}) {
        const PointCloud cloud = cloud_of(shape, 250, 0.2);
        const Kernel kernel = make_kernel(KernelProfile::cubic(), 0.02, cloud.intrinsic_dim());
        const double beta = 0.3;
        const Vector u = random_field(cloud.size(), rng);
        for (Index i = 0; i < cloud.size(); i += 3) {
            double boundary = 0.0;
            for (Index l = cloud.boundary_size() - 1; l >= 0; --l) {
                const Index j = cloud.boundary_indices()[l];
                boundary += (2.0 / beta) * cloud.area_weights()[l] * u[j] *
                            eval_Rbar_t(cloud.point(j), cloud.point(i), kernel.params, kernel.profile);
            }
            const double expected = apply_Lth(cloud, kernel, u, i) + boundary;
            CHECK(apply_Kth(cloud, kernel, beta, u, i) == doctest::Approx(expected).epsilon(1e-12).scale(10.0));
        }
    }
}

TEST_CASE("K_th - L_th depends only on boundary values")
{
    std::mt19937_64 rng(6);
    const PointCloud cloud = cloud_of(Shape::disk, 300);
    const Kernel kernel = make_kernel(KernelProfile::cubic(), 0.02, 2);
    const Vector u = random_field(cloud.size(), rng);
    Vector perturbed = u + random_field(cloud.size(), rng);
    for (Index l = 0; l < cloud.boundary_size(); ++l) perturbed[cloud.boundary_indices()[l]] = u[cloud.boundary_indices()[l]];
    for (Index i = 0; i < cloud.size(); i += 5) {
        CHECK(boundary_penalty(cloud, kernel, 0.1, u, cloud.point(i)) ==
              boundary_penalty(cloud, kernel, 0.1, perturbed, cloud.point(i)));
        const double gap = apply_Kth(cloud, kernel, 0.1, u, i) - apply_Lth(cloud, kernel, u, i);
        const double gap_perturbed =
            apply_Kth(cloud, kernel, 0.1, perturbed, i) - apply_Lth(cloud, kernel, perturbed, i);
        const double magnitude = std::abs(apply_Lth(cloud, kernel, u, i)) + std::abs(apply_Lth(cloud, kernel, perturbed, i)) +
                                 std::abs(gap);
        CHECK(std::abs(gap - gap_perturbed) <= 8.0 * std::numeric_limits<double>::epsilon() * magnitude);
    }
}

TEST_CASE("weighted energy is nonnegative and equals the symmetric double sum")
{
    std::mt19937_64 rng(7);
    for (Shape shape : {Shape::interval, Shape::rectangle, Shape::disk, Shape::spherical_cap}) {
        const PointCloud cloud = cloud_of(shape, 150, 0.25);
        const Kernel kernel = make_kernel(KernelProfile::cubic(), 0.03, cloud.intrinsic_dim());
        CAPTURE(to_string(shape));
        for (int trial = 0; trial < 100; ++trial) {
            const Vector u = random_field(cloud.size(), rng);
            const double energy = weighted_energy(cloud, kernel, u);
            const double form = dirichlet_form(cloud, kernel, u);
            CHECK(energy >= -1e-12 * u.squaredNorm());
            CHECK(std::abs(energy - form) <= 1e-10 * std::abs(form));
        }
    }
}

TEST_CASE("continuous L_t oracle")
{
    ManifoldSpec spec;
    spec.n = 8 * 100 + 1;
    const PointCloud fine = generate(spec);
    const double t = 0.001;
    const Kernel kernel = make_kernel(KernelProfile::cubic(), t, 1);
    Vector mid(1);
    mid << 0.5;

    CHECK(oracle_Lt([](const auto&) { return 4.0; }, mid, fine, kernel) == 0.0);
    CHECK(std::abs(oracle_Lt([](const auto& y) { return y[0]; }, mid, fine, kernel)) <= 1e-10);

    // -int Rbar_t(x, y) u''(y) dy with u'' = 2, by Simpson quadrature over the support.
    const double radius = 2.0 * std::sqrt(t);
    const double wbar = testing::simpson(
        [&](double y) {
            Vector p(1);
            p << y;
            return eval_Rbar_t(mid, p, kernel.params, kernel.profile);
        },
        0.5 - radius, 0.5 + radius, 4000);
    const double value = oracle_Lt([](const auto& y) { return y[0] * y[0]; }, mid, fine, kernel);
    CHECK(value == doctest::Approx(-2.0 * wbar).epsilon(1e-4));
}

TEST_CASE("smoothing map v is a weighted average")
{
    std::mt19937_64 rng(9);
    const PointCloud cloud = cloud_of(Shape::disk, 500, 0.3);
    const Kernel kernel = make_kernel(KernelProfile::cubic(), 0.01, 2);
    const Vector u = random_field(cloud.size(), rng);
    const Vector constant = Vector::Constant(cloud.size(), 0.625);
    for (Index i = 0; i < cloud.size(); i += 11) {
        CHECK(oracle_v(cloud, kernel, constant, cloud.point(i)) == doctest::Approx(0.625).epsilon(1e-15));
        const double v = oracle_v(cloud, kernel, u, cloud.point(i));
        CHECK(v >= u.minCoeff());
        CHECK(v <= u.maxCoeff());
    }
    Vector far(2);
    far << 5.0, 5.0;
    CHECK_THROWS_AS(oracle_v(cloud, kernel, u, far), OutOfSupport);

    ManifoldSpec spec;
    spec.n = 2001;
    const PointCloud line = generate(spec);
    const Vector identity = line.points().row(0).transpose();
    Vector mid(1);
    mid << 0.5;
    CHECK(oracle_v(line, make_kernel(KernelProfile::cubic(), 0.001, 1), identity, mid) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("discrete L_th approaches L_t under refinement")
{
    const double t = 0.01;
    const Kernel kernel = make_kernel(KernelProfile::cubic(), t, 1);
    auto u = [](const auto& y) { return std::sin(3.0 * y[0]) + y[0] * y[0]; };
    double previous = std::numeric_limits<double>::infinity();
    for (Index n : {26, 51, 101, 201}) {
        ManifoldSpec spec;
        spec.n = n;
        spec.jitter = 0.3;
        spec.seed = 12;
        const PointCloud cloud = generate(spec);
        const PointCloud fine = generate(refined(spec, 8));
        Vector values(cloud.size());
        for (Index i = 0; i < cloud.size(); ++i) values[i] = u(cloud.point(i));
        double worst = 0.0;
        for (Index i = 0; i < cloud.size(); ++i) {
            const double x = cloud.point(i)[0];
            if (x < 0.3 || x > 0.7) continue;
            worst = std::max(worst, std::abs(apply_Lth(cloud, kernel, values, i) - oracle_Lt(u, cloud.point(i), fine, kernel)));
        }
        CAPTURE(n);
        CHECK(worst < previous);
        previous = worst;
    }
}

TEST_CASE("oracle-check table passes")
{
    for (const auto& check : run_oracle_checks()) {
        CAPTURE(check.name);
        CAPTURE(check.value);
        CHECK(check.passed);
    }
}

TEST_CASE("field length mismatch is rejected")
{
    const PointCloud cloud = cloud_of(Shape::interval, 11);
    const Kernel kernel = make_kernel(KernelProfile::cubic(), 0.01, 1);
    CHECK_THROWS_AS(apply_Lth(cloud, kernel, Vector::Zero(10), 0), InvalidArgument);
    CHECK_THROWS_AS(boundary_penalty(cloud, kernel, 0.0, Vector::Zero(11), cloud.point(0)), InvalidArgument);
}
