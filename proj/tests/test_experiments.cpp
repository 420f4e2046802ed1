#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deepc/experiments.hpp"
#include "deepc/suites.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace deepc;
using namespace deepc::experiments;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name)
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// small-but-valid experiment for fast end-to-end runs
void shrink_config(const fs::path& config_path)
{
    auto j = nlohmann::json::parse(slurp(config_path), nullptr, true, true);
    j["collection"]["T"] = 150;
    j["run_steps"] = 8;
    j["seed"] = 2;
    std::ofstream out(config_path);
    out << j.dump(2);
}

}  // namespace

TEST_CASE("demo plant shape and structure")
{
    LtiSystem plant = demo_plant();
    CHECK(plant.state_dim() == 4);
    CHECK(plant.input_dim() == 2);
    CHECK(plant.output_dim() == 2);
    CHECK(plant.is_controllable());
    CHECK(observability_index(plant).value() == 2);
    CHECK(plant.A(0, 0) == 0.921);
    CHECK(plant.B(3, 0) == 0.072);
    CHECK(plant.D == Eigen::MatrixXd::Zero(2, 2));
}

TEST_CASE("init writes a loadable config and plant")
{
    TempDir dir("deepc_test_init");
    REQUIRE(cmd_init(dir.str()) == 0);
    REQUIRE(fs::exists(dir.path / "experiment.json"));
    REQUIRE(fs::exists(dir.path / "plant.txt"));

    ExperimentConfig cfg = ExperimentConfig::load((dir.path / "experiment.json").string());
    CHECK(cfg.T == 400);
    CHECK(cfg.T_ini == 10);
    CHECK(cfg.N == 20);
    CHECK(cfg.lambda_u == 1e6);
    CHECK(cfg.lambda_y == 1e4);
    CHECK(cfg.lambda_g == 1e2);
    CHECK(cfg.rank_rule.kind == RankRule::Kind::log_gap);
    CHECK(cfg.setpoint(0) == 0.65);
    CHECK(cfg.setpoint(1) == 0.77);
    CHECK(cfg.u_box.hi(0) == 2.0);
    CHECK(cfg.variant == "both");

    LtiSystem plant = cfg.load_plant();
    CHECK(plant.A == demo_plant().A);
}

TEST_CASE("collect writes csv data and a manifest")
{
    TempDir dir("deepc_test_collect");
    REQUIRE(cmd_init(dir.str()) == 0);
    ExperimentConfig cfg = ExperimentConfig::load((dir.path / "experiment.json").string());
    cfg.T = 120;
    cfg.out_dir = (dir.path / "out").string();
    REQUIRE(cmd_collect(cfg) == 0);

    Trajectory u = Trajectory::load_csv((dir.path / "out" / "u_d.csv").string());
    Trajectory y = Trajectory::load_csv((dir.path / "out" / "y_d.csv").string());
    CHECK(u.length() == 120);
    CHECK(u.channels() == 2);
    CHECK(y.length() == 120);

    auto manifest = nlohmann::json::parse(slurp(dir.path / "out" / "collect_manifest.json"));
    CHECK(manifest["seed"] == 1);
    CHECK(manifest["T"] == 120);
    CHECK(manifest["rng"] == "mt19937_64/canonical53");
    CHECK(manifest["plant_hash"].get<std::string>().size() == 16);

    // same seed reproduces the files byte for byte
    const std::string before = slurp(dir.path / "out" / "u_d.csv");
    REQUIRE(cmd_collect(cfg) == 0);
    CHECK(slurp(dir.path / "out" / "u_d.csv") == before);
}

TEST_CASE("zero-noise collection equals a re-simulation")
{
    TempDir dir("deepc_test_zero_noise");
    REQUIRE(cmd_init(dir.str()) == 0);
    ExperimentConfig cfg = ExperimentConfig::load((dir.path / "experiment.json").string());
    cfg.T = 80;
    cfg.noise_box = Box{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)};
    cfg.out_dir = (dir.path / "out").string();
    REQUIRE(cmd_collect(cfg) == 0);
    Trajectory u = Trajectory::load_csv((dir.path / "out" / "u_d.csv").string());
    Trajectory y = Trajectory::load_csv((dir.path / "out" / "y_d.csv").string());
    SimulationResult resim = simulate(demo_plant(), Eigen::VectorXd::Zero(4), u);
    CHECK((y.data() - resim.output.data()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("reduce reports the selected rank and persists the artifacts")
{
    TempDir dir("deepc_test_reduce");
    REQUIRE(cmd_init(dir.str()) == 0);
    ExperimentConfig cfg = ExperimentConfig::load((dir.path / "experiment.json").string());
    cfg.out_dir = (dir.path / "out").string();
    REQUIRE(cmd_reduce(cfg) == 0);

    auto summary = nlohmann::json::parse(slurp(dir.path / "out" / "reduce_summary.json"));
    CHECK(summary["rows"] == 120);
    CHECK(summary["cols"] == 371);
    CHECK(summary["rank"] == 64);
    REQUIRE(fs::exists(dir.path / "out" / "spectrum.csv"));
    REQUIRE(fs::exists(dir.path / "out" / "h_bar.csv"));
    REQUIRE(fs::exists(dir.path / "out" / "v1.csv"));

    std::ifstream spectrum(dir.path / "out" / "spectrum.csv");
    std::string header;
    std::getline(spectrum, header);
    CHECK(header == "index,sigma,log10_sigma");
    int rows = 0;
    std::string line;
    while (std::getline(spectrum, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 120);
}

TEST_CASE("run emits per-variant logs and a comparison summary")
{
    TempDir dir("deepc_test_run");
    REQUIRE(cmd_init(dir.str()) == 0);
    shrink_config(dir.path / "experiment.json");
    ExperimentConfig cfg = ExperimentConfig::load((dir.path / "experiment.json").string());
    cfg.out_dir = (dir.path / "out").string();
    REQUIRE(cmd_run(cfg) == 0);

    REQUIRE(fs::exists(dir.path / "out" / "run_full.csv"));
    REQUIRE(fs::exists(dir.path / "out" / "run_reduced.csv"));
    auto summary = nlohmann::json::parse(slurp(dir.path / "out" / "run_summary.json"));
    CHECK(summary["library_rows"] == 120);
    CHECK(summary["runs"].size() == 2);
    CHECK(summary["runs"][0]["variant"] == "full");
    CHECK(summary["runs"][1]["variant"] == "reduced");
    CHECK(summary["config"].is_object());

    // determinism end to end: second run reproduces the costs
    const double cost0 = summary["runs"][0]["accumulative_cost"].get<double>();
    REQUIRE(cmd_run(cfg) == 0);
    auto again = nlohmann::json::parse(slurp(dir.path / "out" / "run_summary.json"));
    CHECK(again["runs"][0]["accumulative_cost"].get<double>() == cost0);
}

TEST_CASE("run can include the truncation baseline")
{
    TempDir dir("deepc_test_trunc");
    REQUIRE(cmd_init(dir.str()) == 0);
    shrink_config(dir.path / "experiment.json");
    ExperimentConfig cfg = ExperimentConfig::load((dir.path / "experiment.json").string());
    cfg.out_dir = (dir.path / "out").string();
    cfg.truncation_baseline = true;
    cfg.variant = "reduced";
    REQUIRE(cmd_run(cfg) == 0);
    REQUIRE(fs::exists(dir.path / "out" / "run_truncation.csv"));
    CHECK_FALSE(fs::exists(dir.path / "out" / "run_full.csv"));
}

TEST_CASE("config validation errors exit through exceptions")
{
    TempDir dir("deepc_test_bad");
    REQUIRE(cmd_init(dir.str()) == 0);
    CHECK_THROWS(ExperimentConfig::load((dir.path / "nope.json").string()));

    auto j = nlohmann::json::parse(slurp(dir.path / "experiment.json"), nullptr, true, true);
    j["constraints"]["u"] = {1.0};  // wrong channel count
    std::ofstream((dir.path / "experiment.json").string()) << j.dump(2);
    CHECK_THROWS_WITH(
        (void)ExperimentConfig::load((dir.path / "experiment.json").string()),
        doctest::Contains("constraints.u"));
}

TEST_CASE("bench point favors the reduced controller")
{
    LtiSystem plant = demo_plant();
    BenchPoint pt = bench_point(plant, 150, 4, 8, 3, 4, QpSettings{});
    CHECK(pt.full_dim == 150 - 12 + 1);
    CHECK(pt.reduced_dim == 2 * 12 + 4);
    CHECK(pt.mean_full_ms > 0.0);
    CHECK(pt.ratio < 1.0);
}

TEST_CASE("equivalence suite gates on positive regularizers")
{
    suites::SuiteResult gated = suites::equivalence_suite(1, 5, 1e-6, 1e6, 1e4, 0.0);
    CHECK_FALSE(gated.passed());
    CHECK(gated.note.find("positive") != std::string::npos);
    CHECK(gated.trials == 0);  // nothing ran under a violated hypothesis
}

TEST_CASE("check exits nonzero when a hypothesis is violated")
{
    TempDir dir("deepc_test_check_gate");
    REQUIRE(cmd_init(dir.str()) == 0);
    ExperimentConfig cfg = ExperimentConfig::load((dir.path / "experiment.json").string());
    cfg.out_dir = (dir.path / "out").string();
    cfg.lambda_g = 0.0;
    CHECK(cmd_check(cfg) == 1);
    auto report = nlohmann::json::parse(slurp(dir.path / "out" / "check_report.json"));
    CHECK(report["passed"] == false);
    bool flagged = false;
    for (const auto& s : report["suites"]) {
        if (s["name"] == "equivalence" && !s["note"].get<std::string>().empty()) flagged = true;
    }
    CHECK(flagged);
}

TEST_CASE("file hash is stable and content sensitive")
{
    TempDir dir("deepc_test_hash");
    std::ofstream(dir.path / "a.txt") << "hello";
    std::ofstream(dir.path / "b.txt") << "hello";
    std::ofstream(dir.path / "c.txt") << "hellp";
    CHECK(file_hash_hex((dir.path / "a.txt").string()) ==
          file_hash_hex((dir.path / "b.txt").string()));
    CHECK(file_hash_hex((dir.path / "a.txt").string()) !=
          file_hash_hex((dir.path / "c.txt").string()));
}
