#include "pim/config.hpp"

#include <doctest.h>

#include <cmath>

using namespace pim;

TEST_CASE("parsing with comments, blank lines and later assignments winning")
{
    const Config config = Config::parse("# header\n"
                                        "manifold.shape = disk\n"
                                        "\n"
                                        "manifold.n=800   # trailing\n"
                                        "solver.tol = 1e-12\n"
                                        "manifold.n = 900\n");
    CHECK(config.get_string("manifold.shape", "") == "disk");
    CHECK(config.get_integer("manifold.n", 0) == 900);
    CHECK(config.get_real("solver.tol", 0.0) == 1e-12);
    CHECK(config.get_real("kernel.t", 0.25) == 0.25);
    CHECK_FALSE(config.has("kernel.t"));
    CHECK(config.entries().size() == 3);
}

TEST_CASE("malformed configs are rejected")
{
    CHECK_THROWS_AS(Config::parse("manifold.shape disk\n"), ParseError);
    CHECK_THROWS_AS(Config::parse("manifold.colour = red\n"), ParseError);
    CHECK_THROWS_AS(Config::parse("manifold.n = many\n").get_integer("manifold.n", 0), ParseError);
    CHECK_THROWS_AS(Config::parse("sweep.record_time = maybe\n").get_bool("sweep.record_time", true), ParseError);
    Config config;
    CHECK_THROWS_AS(config.set_assignment("solver.tol"), ParseError);
    CHECK_THROWS_AS(config.set("bogus", "1"), ParseError);
    try {
        Config::parse("seed = 1\nmanifold.colour = red\n");
    } catch (const ParseError& error) {
        CHECK(std::string(error.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("lists and booleans")
{
    Config config;
    config.set_assignment("sweep.levels = 101, 201 401,801");
    CHECK(config.get_integer_list("sweep.levels") == std::vector<long long>{101, 201, 401, 801});
    config.set("sweep.record_time", "off");
    CHECK_FALSE(config.get_bool("sweep.record_time", true));
    CHECK(config.get_real_list("robin.beta").empty());
}

TEST_CASE("manifold spec from config")
{
    Config config;
    config.set("manifold.shape", "rectangle");
    config.set("manifold.n", "400");
    config.set("manifold.width_x", "2");
    config.set("seed", "9");
    const ManifoldSpec spec = manifold_from(config);
    CHECK(spec.shape == Shape::rectangle);
    CHECK(spec.n == 400);
    CHECK(spec.width_x == 2.0);
    CHECK(spec.seed == 9);

    ManifoldSpec defaults;
    defaults.shape = Shape::spherical_cap;
    defaults.z0 = 0.25;
    CHECK(manifold_from(Config{}, defaults).z0 == 0.25);

    config.set("seed", "-1");
    CHECK_THROWS_AS(manifold_from(config), ParseError);
    config.set("seed", "1");
    config.set("manifold.shape", "torus");
    CHECK_THROWS_AS(manifold_from(config), InvalidArgument);
}

TEST_CASE("pipeline options from config")
{
    const Config config = Config::parse("kernel.profile = truncated_gaussian\n"
                                        "solver.method = iterative\n"
                                        "solver.restart = 30\n"
                                        "assembly.storage = sparse\n"
                                        "guardrail.sqrt_t_over_beta = 2\n"
                                        "sweep.reference_factor = 2\n"
                                        "sweep.record_time = false\n");
    const PipelineOptions options = pipeline_from(config);
    CHECK(options.profile.name() == "truncated_gaussian");
    CHECK(options.solver.method == SolveMethod::iterative);
    CHECK(options.solver.restart == 30);
    CHECK(options.assembly.storage == Storage::sparse);
    CHECK(options.guardrails.sqrt_t_over_beta == 2.0);
    CHECK(options.reference_factor == 2);
    CHECK_FALSE(options.record_time);

    CHECK_THROWS_AS(pipeline_from(Config::parse("solver.tol = 0\n")), InvalidArgument);
    CHECK_THROWS_AS(pipeline_from(Config::parse("assembly.storage = banded\n")), ParseError);
    CHECK_THROWS_AS(pipeline_from(Config::parse("kernel.profile = epanechnikov\n")), InvalidArgument);
}

TEST_CASE("coupling from config")
{
    const Coupling fixed = coupling_from(Config::parse("kernel.t = 0.004\nrobin.beta = 0.25\n"));
    REQUIRE(std::holds_alternative<FixedParameters>(fixed));
    CHECK(std::get<FixedParameters>(fixed).t == 0.004);
    CHECK(std::get<FixedParameters>(fixed).beta == 0.25);

    const Coupling power = coupling_from(Config::parse("coupling.gamma_t = 0.5\n"));
    REQUIRE(std::holds_alternative<PowerCoupling>(power));
    CHECK(std::get<PowerCoupling>(power).gamma_t == 0.5);
    CHECK(std::get<PowerCoupling>(power).c_t == PowerCoupling{}.c_t);

    CHECK(std::holds_alternative<PowerCoupling>(coupling_from(Config{})));
    CHECK_THROWS_AS(coupling_from(Config::parse("kernel.t = 0.004\n")), InvalidArgument);
    CHECK_THROWS_AS(coupling_from(Config::parse("kernel.t = 0.004\nrobin.beta = 0.2\ncoupling.c_t = 1\n")),
                    InvalidArgument);
    CHECK_THROWS_AS(coupling_from(Config::parse("coupling.gamma_t = 0.7\n")), InvalidArgument);
}
