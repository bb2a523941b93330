#include "pim/cli.hpp"
#include "pim/csv.hpp"
#include "pim/pointcloud.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

using namespace pim;
namespace fs = std::filesystem;

namespace {

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class Scratch
{
public:
    Scratch() : m_dir(fs::temp_directory_path() / ("pim_test_cli_" + std::to_string(++s_counter)))
    {
        fs::remove_all(m_dir);
        fs::create_directories(m_dir);
    }
    ~Scratch() { fs::remove_all(m_dir); }

    std::string operator/(const std::string& name) const { return (m_dir / name).string(); }

private:
    static inline int s_counter = 0;
    fs::path m_dir;
};

std::vector<std::vector<double>> read_rows(const std::string& path)
{
    std::vector<std::vector<double>> rows;
    const std::string text = csv::read_file(path);
    bool header = true;
    for (auto line : csv::lines(text)) {
        if (csv::trim(line).empty() || line.front() == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        for (auto field : csv::split(line)) row.push_back(field.empty() ? std::nan("") : csv::parse_real(field));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST_CASE("generate writes one row per point")
{
    Scratch dir;
    const Run result = run({"generate", "--shape", "interval", "--n", "101", "--out", dir / "line.csv"});
    CHECK(result.code == exit_ok);
    const PointCloud cloud = load_cloud(dir / "line.csv");
    CHECK(cloud.size() == 101);
    CHECK(cloud.boundary_size() == 2);
    CHECK(read_rows(dir / "line.csv").size() == 101);
}

TEST_CASE("generated disk has total volume close to pi")
{
    Scratch dir;
    REQUIRE(run({"generate", "--shape", "disk", "--n", "2000", "--out", dir / "disk.csv"}).code == exit_ok);
    const PointCloud cloud = load_cloud(dir / "disk.csv");
    CHECK(cloud.volume_weights().sum() == doctest::Approx(std::numbers::pi).epsilon(0.01));
    CHECK(cloud.area_weights().sum() == doctest::Approx(2.0 * std::numbers::pi).epsilon(0.01));
}

TEST_CASE("usage errors exit 1 with help")
{
    const Run missing = run({"generate", "--shape", "disk"});
    CHECK(missing.code == exit_usage);
    CHECK(missing.err.find("--out is required") != std::string::npos);
    CHECK(missing.err.find("--shape") != std::string::npos);

    CHECK(run({}).code == exit_usage);
    CHECK(run({"transmogrify"}).code == exit_usage);
    CHECK(run({"generate", "--frobnicate", "1"}).code == exit_usage);
    CHECK(run({"--help"}).code == exit_ok);
}

TEST_CASE("zero source with unit boundary data gives the unit solution")
{
    Scratch dir;
    REQUIRE(run({"generate", "--shape", "disk", "--n", "600", "--out", dir / "disk.csv"}).code == exit_ok);
    const Run result = run({"solve", "--cloud", dir / "disk.csv", "--f-value", "0", "--b-value", "1", "--t", "0.01",
                            "--beta", "0.2", "--out", dir / "u.csv"});
    REQUIRE(result.code == exit_ok);
    CHECK(result.out.find("residual = ") != std::string::npos);
    const auto rows = read_rows(dir / "u.csv");
    REQUIRE(rows.size() == static_cast<size_t>(load_cloud(dir / "disk.csv").size()));
    for (const auto& row : rows) CHECK(std::abs(row.back() - 1.0) <= 1e-9);
}

TEST_CASE("solve reads per-point data files and writes the report and interpolant")
{
    Scratch dir;
    REQUIRE(run({"generate", "--shape", "interval", "--n", "51", "--out", dir / "line.csv"}).code == exit_ok);
    std::string f = "f\n", b = "b\n1\n1\n";
    for (int i = 0; i < 51; ++i) f += "0\n";
    csv::write_file(dir / "f.csv", f);
    csv::write_file(dir / "b.csv", b);
    csv::write_file(dir / "query.csv", "x1\n0.25\n0.5\n");
    const Run result = run({"solve", "--cloud", dir / "line.csv", "--f-file", dir / "f.csv", "--b-file", dir / "b.csv",
                            "--t", "0.004", "--beta", "0.2", "--out", dir / "u.csv", "--report", dir / "report.txt",
                            "--query", dir / "query.csv", "--eval-out", dir / "eval.csv", "--matrix-out",
                            dir / "system.mtx"});
    REQUIRE(result.code == exit_ok);
    CHECK(result.out.empty());
    const std::string report = csv::read_file(dir / "report.txt");
    CHECK(report.find("n = 51\n") != std::string::npos);
    CHECK(report.find("t = 0.004") != std::string::npos);
    const auto evaluations = read_rows(dir / "eval.csv");
    REQUIRE(evaluations.size() == 2);
    CHECK(evaluations[1][1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fs::exists(dir / "system.mtx"));

    csv::write_file(dir / "b.csv", "b\n1\n1\n1\n");
    CHECK(run({"solve", "--cloud", dir / "line.csv", "--f-file", dir / "f.csv", "--b-file", dir / "b.csv", "--t",
               "0.004", "--beta", "0.2", "--out", dir / "u.csv"})
              .code == exit_input);
}

TEST_CASE("built-in case reports the error against the exact solution")
{
    Scratch dir;
    const Run result = run({"solve", "--case", "disk_paraboloid", "--out", dir / "u.csv"});
    REQUIRE(result.code == exit_ok);
    CHECK(result.out.find("case = disk_paraboloid") != std::string::npos);
    const auto at = result.out.find("max_abs_error = ");
    REQUIRE(at != std::string::npos);
    const double error = std::stod(result.out.substr(at + 16));
    // Recorded from the first run at the default resolution.
    const double recorded = 0.2452444217308507;
    CHECK(error > 0.0);
    CHECK(error <= recorded * (1.0 + 1e-12));
}

TEST_CASE("malformed input files exit 2")
{
    Scratch dir;
    csv::write_file(dir / "bad.csv", "x1,volume,is_boundary,area\n0.0,0.5,1\nnot,a,cloud,row\n");
    CHECK(run({"solve", "--cloud", dir / "bad.csv", "--f-value", "0", "--b-value", "1", "--t", "0.01", "--beta",
               "0.2", "--out", dir / "u.csv"})
              .code == exit_input);
    CHECK(run({"solve", "--cloud", dir / "missing.csv", "--f-value", "0", "--b-value", "1", "--t", "0.01", "--beta",
               "0.2", "--out", dir / "u.csv"})
              .code != exit_ok);
    csv::write_file(dir / "bad.cfg", "manifold.colour = red\n");
    CHECK(run({"generate", "--config", dir / "bad.cfg", "--out", dir / "c.csv"}).code == exit_input);
    CHECK(run({"generate", "--set", "manifold.n=-4", "--out", dir / "c.csv"}).code == exit_input);
}

TEST_CASE("unwritable output exits 4")
{
    CHECK(run({"generate", "--n", "11", "--out", "/nonexistent-directory/cloud.csv"}).code == exit_io);
}

TEST_CASE("config file, --set and flags apply in that order")
{
    Scratch dir;
    csv::write_file(dir / "run.cfg", "manifold.shape = interval\nmanifold.n = 50\n");
    REQUIRE(run({"generate", "--config", dir / "run.cfg", "--out", dir / "a.csv"}).code == exit_ok);
    CHECK(load_cloud(dir / "a.csv").size() == 50);
    REQUIRE(run({"generate", "--config", dir / "run.cfg", "--set", "manifold.n=60", "--out", dir / "b.csv"}).code ==
          exit_ok);
    CHECK(load_cloud(dir / "b.csv").size() == 60);
    REQUIRE(run({"generate", "--config", dir / "run.cfg", "--set", "manifold.n=60", "--n", "70", "--out",
                 dir / "c.csv"})
                .code == exit_ok);
    CHECK(load_cloud(dir / "c.csv").size() == 70);
}

TEST_CASE("same seed gives identical clouds")
{
    Scratch dir;
    for (const char* name : {"a.csv", "b.csv"}) {
        REQUIRE(run({"generate", "--shape", "rectangle", "--n", "300", "--jitter", "0.3", "--seed", "5", "--out",
                     dir / name})
                    .code == exit_ok);
    }
    REQUIRE(run({"generate", "--shape", "rectangle", "--n", "300", "--jitter", "0.3", "--seed", "6", "--out",
                 dir / "c.csv"})
                .code == exit_ok);
    CHECK(csv::read_file(dir / "a.csv") == csv::read_file(dir / "b.csv"));
    CHECK(csv::read_file(dir / "a.csv") != csv::read_file(dir / "c.csv"));
}

TEST_CASE("sweep over four levels")
{
    Scratch dir;
    const Run result = run({"sweep", "--case", "interval_sine", "--levels", "101,201,401,801", "--no-time", "--out",
                            dir / "sweep.csv"});
    REQUIRE(result.code == exit_ok);
    const auto rows = read_rows(dir / "sweep.csv");
    REQUIRE(rows.size() == 4);
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][1] > rows[i - 1][1]);
        CHECK(rows[i][6] < rows[i - 1][6]);
        CHECK(rows[i][9] == 0.0);
    }
    CHECK(result.out.find("lemma") != std::string::npos);
}

TEST_CASE("single-level sweep and invalid coupling")
{
    Scratch dir;
    REQUIRE(run({"sweep", "--case", "interval_sine", "--levels", "101", "--out", dir / "one.csv"}).code == exit_ok);
    CHECK(read_rows(dir / "one.csv").size() == 1);

    const Run bad = run({"sweep", "--case", "interval_sine", "--levels", "101", "--gamma-t", "0.7", "--out",
                         dir / "bad.csv"});
    CHECK(bad.code == exit_input);
    CHECK(bad.err.find("2/3") != std::string::npos);
    CHECK(run({"sweep", "--case", "interval_sine", "--out", dir / "x.csv"}).code == exit_usage);
    CHECK(run({"sweep", "--case", "interval_sine", "--levels", "101", "--shape", "disk", "--out", dir / "x.csv"})
              .code == exit_input);
}

TEST_CASE("failing sweep level writes partial results and exits 3")
{
    Scratch dir;
    const Run result = run({"sweep", "--case", "interval_sine", "--levels", "101,2", "--out", dir / "partial.csv"});
    CHECK(result.code == exit_numerical);
    CHECK(read_rows(dir / "partial.csv").size() == 1);
}

TEST_CASE("guardrail violations are warnings")
{
    Scratch dir;
    const Run result = run({"solve", "--case", "interval_sine", "--t", "0.01", "--beta", "0.05", "--out",
                            dir / "u.csv"});
    CHECK(result.code == exit_ok);
    CHECK(result.err.find("warning") != std::string::npos);
    CHECK(result.out.find("guardrail_beta_violated = true") != std::string::npos);
}

TEST_CASE("oracle-check passes")
{
    const Run result = run({"oracle-check"});
    CHECK(result.code == exit_ok);
    CHECK(result.out.find("PASS") != std::string::npos);
    CHECK(result.out.find("FAIL") == std::string::npos);
}
