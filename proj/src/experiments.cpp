#include "deepc/experiments.hpp"

#include "deepc/kernels.hpp"
#include "deepc/problem.hpp"
#include "deepc/rng.hpp"
#include "deepc/suites.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace deepc::experiments {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Box parse_box(const json& j, int channels, const std::string& name)
{
    Box box;
    if (j.is_array() && !j.empty() && j.front().is_number()) {
        if (static_cast<int>(j.size()) != channels) {
            throw std::runtime_error("config: " + name + " must list " +
                                     std::to_string(channels) + " channel magnitudes");
        }
        box.lo.resize(channels);
        box.hi.resize(channels);
        for (int i = 0; i < channels; ++i) {
            const double v = j[static_cast<size_t>(i)].get<double>();
            box.lo(i) = -v;
            box.hi(i) = v;
        }
    } else if (j.is_object() && j.contains("lo") && j.contains("hi")) {
        const auto lo = j.at("lo");
        const auto hi = j.at("hi");
        if (static_cast<int>(lo.size()) != channels || static_cast<int>(hi.size()) != channels) {
            throw std::runtime_error("config: " + name + " lo/hi must list " +
                                     std::to_string(channels) + " entries");
        }
        box.lo.resize(channels);
        box.hi.resize(channels);
        for (int i = 0; i < channels; ++i) {
            box.lo(i) = lo[static_cast<size_t>(i)].get<double>();
            box.hi(i) = hi[static_cast<size_t>(i)].get<double>();
        }
    } else {
        throw std::runtime_error("config: " + name +
                                 " must be a magnitude array or a {lo, hi} object");
    }
    if (!box.valid()) {
        throw std::runtime_error("config: " + name + " has lo > hi");
    }
    return box;
}

Eigen::MatrixXd parse_weight(const json& j, int dim, const std::string& name)
{
    if (j.is_number()) {
        return j.get<double>() * Eigen::MatrixXd::Identity(dim, dim);
    }
    if (j.is_array() && !j.empty() && j.front().is_array()) {
        if (static_cast<int>(j.size()) != dim) {
            throw std::runtime_error("config: " + name + " must be " + std::to_string(dim) + "x" +
                                     std::to_string(dim));
        }
        Eigen::MatrixXd m(dim, dim);
        for (int i = 0; i < dim; ++i) {
            const auto& row = j[static_cast<size_t>(i)];
            if (static_cast<int>(row.size()) != dim) {
                throw std::runtime_error("config: ragged matrix for " + name);
            }
            for (int k = 0; k < dim; ++k) m(i, k) = row[static_cast<size_t>(k)].get<double>();
        }
        return m;
    }
    throw std::runtime_error("config: " + name + " must be a scale or a full matrix");
}

RankRule parse_rank_rule(const json& j)
{
    if (!j.is_object() || !j.contains("kind")) {
        throw std::runtime_error("config: rank_rule needs a kind");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "fixed") return RankRule::fixed(j.at("r").get<int>());
    if (kind == "threshold") return RankRule::threshold(j.value("rel_tol", 1e-6));
    if (kind == "log_gap") {
        return RankRule::log_gap(j.value("min_decades", 1.0), j.value("fallback_rel_tol", 1e-6));
    }
    if (kind == "structural") return RankRule::structural(j.value("ml_plus_n", 0));
    throw std::runtime_error("config: unknown rank_rule kind '" + kind + "'");
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path);
    }
    out << text;
}

void store_matrix_csv(const Eigen::MatrixXd& m, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write matrix file: " + path);
    }
    char buf[32];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
}

json config_echo_json(const ExperimentConfig& cfg)
{
    if (cfg.config_echo.empty()) return json::object();
    return json::parse(cfg.config_echo, nullptr, true, /*ignore_comments=*/true);
}

json suite_json(const suites::SuiteResult& s)
{
    return json{{"name", s.name},        {"trials", s.trials}, {"failures", s.failures},
                {"worst", s.worst},      {"tolerance", s.tolerance},
                {"note", s.note},        {"passed", s.passed()}};
}

}  // namespace

LtiSystem demo_plant()
{
    LtiSystem sys;
    sys.A.resize(4, 4);
    sys.A << 0.921, 0, 0.041, 0,
             0, 0.918, 0, 0.033,
             0, 0, 0.924, 0,
             0, 0, 0, 0.937;
    sys.B.resize(4, 2);
    sys.B << 0.017, 0.001,
             0.001, 0.023,
             0, 0.061,
             0.072, 0;
    sys.C.resize(2, 4);
    sys.C << 1, 0, 0, 0,
             0, 1, 0, 0;
    sys.D = Eigen::MatrixXd::Zero(2, 2);
    return sys;
}

std::string file_hash_hex(const std::string& path)
{
    const std::string bytes = read_file(path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    const std::string text = read_file(path);
    json j = json::parse(text, nullptr, true, /*ignore_comments=*/true);

    ExperimentConfig cfg;
    cfg.config_echo = text;
    cfg.plant_file = j.at("plant").get<std::string>();
    // plant paths are relative to the config file
    const fs::path base = fs::path(path).parent_path();
    if (!cfg.plant_file.empty() && fs::path(cfg.plant_file).is_relative()) {
        cfg.plant_file = (base / cfg.plant_file).string();
    }
    LtiSystem plant = LtiSystem::load(cfg.plant_file);
    const int m = plant.input_dim();
    const int p = plant.output_dim();

    const auto& collection = j.at("collection");
    cfg.T = collection.at("T").get<int>();
    cfg.input_box = parse_box(collection.at("input_box"), m, "collection.input_box");
    cfg.noise_box = parse_box(collection.at("noise_box"), p, "collection.noise_box");

    const auto& horizons = j.at("horizons");
    cfg.T_ini = horizons.at("T_ini").get<int>();
    cfg.N = horizons.at("N").get<int>();

    const auto& weights = j.at("weights");
    cfg.Q = parse_weight(weights.at("Q"), p * cfg.N, "Q");
    cfg.R = parse_weight(weights.at("R"), m * cfg.N, "R");
    cfg.lambda_u = weights.at("lambda_u").get<double>();
    cfg.lambda_y = weights.at("lambda_y").get<double>();
    cfg.lambda_g = weights.at("lambda_g").get<double>();

    const auto& constraints = j.at("constraints");
    cfg.u_box = parse_box(constraints.at("u"), m, "constraints.u");
    cfg.y_box = parse_box(constraints.at("y"), p, "constraints.y");

    cfg.run_noise = Box{Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p)};
    if (j.contains("run_noise")) {
        cfg.run_noise = parse_box(j.at("run_noise"), p, "run_noise");
    }

    const auto& setpoint = j.at("setpoint");
    if (static_cast<int>(setpoint.size()) != p) {
        throw std::runtime_error("config: setpoint must list p entries");
    }
    cfg.setpoint.resize(p);
    for (int i = 0; i < p; ++i) cfg.setpoint(i) = setpoint[static_cast<size_t>(i)].get<double>();

    cfg.rank_rule = parse_rank_rule(j.at("rank_rule"));
    cfg.truncation_baseline = j.value("truncation_baseline", false);
    cfg.variant = j.value("variant", std::string("both"));
    if (cfg.variant != "full" && cfg.variant != "reduced" && cfg.variant != "both") {
        throw std::runtime_error("config: variant must be full, reduced or both");
    }
    cfg.run_steps = j.value("run_steps", 100);
    cfg.apply_steps = j.value("apply_steps", 1);
    cfg.seed = j.value("seed", 1ull);
    cfg.out_dir = j.value("out_dir", std::string("out"));
    if (j.contains("solver")) {
        cfg.solver_tolerance = j.at("solver").value("tolerance", 1e-8);
        cfg.solver_max_iterations = j.at("solver").value("max_iterations", 10000);
    }
    return cfg;
}

LtiSystem ExperimentConfig::load_plant() const
{
    return LtiSystem::load(plant_file);
}

DeepcConfig ExperimentConfig::controller_config(const LtiSystem& plant) const
{
    DeepcConfig cfg;
    cfg.T_ini = T_ini;
    cfg.N = N;
    cfg.Q = Q;
    cfg.R = R;
    cfg.lambda_u = lambda_u;
    cfg.lambda_y = lambda_y;
    cfg.lambda_g = lambda_g;
    cfg.input_constraints.channel_box = u_box;
    cfg.output_constraints.channel_box = y_box;
    cfg.apply_steps = apply_steps;
    cfg.reference = DeepcConfig::constant_reference(setpoint, N);
    cfg.validate(plant.input_dim(), plant.output_dim());
    return cfg;
}

namespace {

// rank rule with the structural bound filled in from the plant at hand
RankRule resolved_rule(const ExperimentConfig& cfg, const LtiSystem& plant)
{
    RankRule rule = cfg.rank_rule;
    if (rule.kind == RankRule::Kind::structural && rule.ml_plus_n == 0) {
        rule.ml_plus_n = plant.input_dim() * (cfg.T_ini + cfg.N) + plant.state_dim();
    }
    return rule;
}

BlockMatrix build_library(const Trajectory& u_d, const Trajectory& y_d, int L)
{
    return stack_input_output(build_hankel(u_d, L), build_hankel(y_d, L));
}

}  // namespace

int cmd_init(const std::string& out_dir)
{
    fs::create_directories(out_dir);
    const std::string plant_path = (fs::path(out_dir) / "plant.txt").string();
    demo_plant().store(plant_path);

    const std::string config = R"({
  // experiment description; paths are relative to this file
  "plant": "plant.txt",

  "collection": {
    "T": 400,                      // offline trajectory length
    "input_box": [3.0, 3.0],       // per-channel |u| for the excitation draw
    "noise_box": [0.002, 0.002]    // per-channel uniform output noise
  },

  "horizons": { "T_ini": 10, "N": 20 },

  "weights": {
    "Q": 35.0,                     // output tracking weight (scale or full pN x pN matrix)
    "R": 1e-4,                     // input effort weight (scale or full mN x mN matrix)
    "lambda_u": 1e6,               // past-input softening
    "lambda_y": 1e4,               // past-output softening
    "lambda_g": 1e2                // coefficient regularization
  },

  "constraints": {
    "u": [2.0, 2.0],               // per-channel |u| bound (or {"lo": [...], "hi": [...]})
    "y": [2.0, 2.0]
  },

  "setpoint": [0.65, 0.77],
  "run_noise": [0.0, 0.0],         // closed-loop measurement noise (off by default)



  // rank selection: log_gap (turning point), threshold, structural, fixed
  "rank_rule": { "kind": "log_gap", "min_decades": 1.0, "fallback_rel_tol": 1e-6 },
  "truncation_baseline": false,    // also run the first-r-columns baseline

  "variant": "both",               // full | reduced | both
  "run_steps": 100,
  "apply_steps": 1,
  "seed": 1,
  "out_dir": "out",

  "solver": { "tolerance": 1e-8, "max_iterations": 10000 }
})";
    const std::string config_path = (fs::path(out_dir) / "experiment.json").string();
    write_text(config_path, config);
    std::cout << "wrote " << config_path << " and " << plant_path << "\n";
    return 0;
}

int cmd_collect(const ExperimentConfig& cfg)
{
    LtiSystem plant = cfg.load_plant();
    fs::create_directories(cfg.out_dir);
    auto [u_d, y_d] = collect_data(plant, cfg.T, cfg.input_box, cfg.noise_box, cfg.seed);

    const fs::path dir(cfg.out_dir);
    u_d.store_csv((dir / "u_d.csv").string());
    y_d.store_csv((dir / "y_d.csv").string());

    json manifest{{"seed", cfg.seed},
                  {"rng", std::string(Rng::kAlgorithm)},
                  {"T", cfg.T},
                  {"plant", cfg.plant_file},
                  {"plant_hash", file_hash_hex(cfg.plant_file)},
                  {"input_box_hi", std::vector<double>(cfg.input_box.hi.data(),
                                                       cfg.input_box.hi.data() + cfg.input_box.size())},
                  {"noise_box_hi", std::vector<double>(cfg.noise_box.hi.data(),
                                                       cfg.noise_box.hi.data() + cfg.noise_box.size())},
                  {"config", config_echo_json(cfg)}};
    write_text((dir / "collect_manifest.json").string(), manifest.dump(2) + "\n");
    std::cout << "collected T=" << cfg.T << " samples -> " << (dir / "u_d.csv").string() << ", "
              << (dir / "y_d.csv").string() << "\n";
    return 0;
}

int cmd_reduce(const ExperimentConfig& cfg)
{
    LtiSystem plant = cfg.load_plant();
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);

    Trajectory u_d, y_d;
    if (fs::exists(dir / "u_d.csv") && fs::exists(dir / "y_d.csv")) {
        u_d = Trajectory::load_csv((dir / "u_d.csv").string());
        y_d = Trajectory::load_csv((dir / "y_d.csv").string());
    } else {
        std::tie(u_d, y_d) = collect_data(plant, cfg.T, cfg.input_box, cfg.noise_box, cfg.seed);
        u_d.store_csv((dir / "u_d.csv").string());
        y_d.store_csv((dir / "y_d.csv").string());
    }

    const int L = cfg.T_ini + cfg.N;
    BlockMatrix lib = build_library(u_d, y_d, L);
    SvdBundle bundle = svd(lib);
    const RankRule rule = resolved_rule(cfg, plant);
    ReducedLibrary red = reduce(lib, rule);

    store_spectrum_csv(bundle.singular_values, (dir / "spectrum.csv").string());
    store_matrix_csv(red.h_bar, (dir / "h_bar.csv").string());
    store_matrix_csv(red.v1, (dir / "v1.csv").string());

    json summary{{"rows", lib.rows()},
                 {"cols", lib.cols()},
                 {"rank", red.rank},
                 {"rule", red.rank_rule},
                 {"rng", std::string(Rng::kAlgorithm)},
                 {"sigma_max", bundle.singular_values(0)},
                 {"sigma_at_rank", red.retained_singular_values(red.rank - 1)},
                 {"seed", cfg.seed},
                 {"config", config_echo_json(cfg)}};
    write_text((dir / "reduce_summary.json").string(), summary.dump(2) + "\n");

    std::cout << "library " << lib.rows() << "x" << lib.cols() << ", rule " << red.rank_rule
              << " selected r=" << red.rank << "\n";
    return 0;
}

namespace {

json log_json(const ClosedLoopLog& log)
{
    return json{{"variant", log.variant},
                {"decision_dim", log.decision_dim},
                {"steps", log.steps.size()},
                {"solves", log.solves},
                {"accumulative_cost", log.accumulative_cost},
                {"mean_solve_ms", log.mean_solve_ms},
                {"median_solve_ms", log.median_solve_ms},
                {"seed", log.seed}};
}

}  // namespace

int cmd_run(const ExperimentConfig& cfg)
{
    LtiSystem plant = cfg.load_plant();
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);

    auto [u_d, y_d] = collect_data(plant, cfg.T, cfg.input_box, cfg.noise_box, cfg.seed);
    const int L = cfg.T_ini + cfg.N;
    const int n_order = plant.state_dim() + L;
    ExcitationReport excitation = check_persistent_excitation(u_d, n_order);
    if (!excitation.satisfied) {
        std::cerr << "warning: input data not persistently exciting of order " << n_order
                  << (excitation.diagnostic.empty() ? "" : ": " + excitation.diagnostic) << "\n";
    }

    BlockMatrix lib = build_library(u_d, y_d, L);
    ReducedLibrary red = reduce(lib, resolved_rule(cfg, plant));

    DeepcConfig dcfg = cfg.controller_config(plant);
    QpSettings solver{cfg.solver_tolerance, cfg.solver_max_iterations};

    std::vector<ClosedLoopLog> logs;
    const int m = plant.input_dim();
    const int p = plant.output_dim();
    const bool noisy = cfg.run_noise.valid() && (cfg.run_noise.hi - cfg.run_noise.lo).norm() > 0.0;
    const Box* noise = noisy ? &cfg.run_noise : nullptr;
    if (cfg.variant == "full" || cfg.variant == "both") {
        logs.push_back(run_closed_loop(plant, partition(lib, cfg.T_ini, cfg.N, m, p), dcfg,
                                       cfg.run_steps, cfg.seed, solver, "full", noise));
    }
    if (cfg.variant == "reduced" || cfg.variant == "both") {
        logs.push_back(run_closed_loop(plant, partition(red, cfg.T_ini, cfg.N, m, p), dcfg,
                                       cfg.run_steps, cfg.seed, solver, "reduced", noise));
    }
    if (cfg.truncation_baseline) {
        ReducedLibrary trunc = truncate_columns(lib, red.rank);
        logs.push_back(run_closed_loop(plant, partition(trunc, cfg.T_ini, cfg.N, m, p), dcfg,
                                       cfg.run_steps, cfg.seed, solver, "truncation", noise));
    }

    json summary{{"library_rows", lib.rows()},
                 {"library_cols", lib.cols()},
                 {"rank", red.rank},
                 {"rule", red.rank_rule},
                 {"excitation_satisfied", excitation.satisfied},
                 {"seed", cfg.seed},
                 {"rng", std::string(Rng::kAlgorithm)},
                 {"config", config_echo_json(cfg)},
                 {"runs", json::array()}};

    std::printf("%-11s %9s %14s %16s %18s\n", "variant", "dim", "mean_solve_ms", "median_solve_ms",
                "accumulative_cost");
    for (const auto& log : logs) {
        log.store_csv((dir / ("run_" + log.variant + ".csv")).string());
        summary["runs"].push_back(log_json(log));
        std::printf("%-11s %9d %14.3f %16.3f %18.4f\n", log.variant.c_str(), log.decision_dim,
                    log.mean_solve_ms, log.median_solve_ms, log.accumulative_cost);
    }
    write_text((dir / "run_summary.json").string(), summary.dump(2) + "\n");
    return 0;
}

int cmd_check(const ExperimentConfig& cfg)
{
    fs::create_directories(cfg.out_dir);
    auto results = suites::run_all(cfg.seed, cfg.lambda_u, cfg.lambda_y, cfg.lambda_g);

    bool all_passed = true;
    json report{{"seed", cfg.seed},
                {"rng", std::string(Rng::kAlgorithm)},
                {"config", config_echo_json(cfg)},
                {"suites", json::array()}};
    for (const auto& s : results) {
        report["suites"].push_back(suite_json(s));
        all_passed = all_passed && s.passed();
        std::printf("[%s] %-14s trials=%-4d failures=%-3d worst=%.3e%s%s\n",
                    s.passed() ? "pass" : "FAIL", s.name.c_str(), s.trials, s.failures, s.worst,
                    s.note.empty() ? "" : " note=", s.note.c_str());
    }
    report["passed"] = all_passed;
    write_text((fs::path(cfg.out_dir) / "check_report.json").string(), report.dump(2) + "\n");
    return all_passed ? 0 : 1;
}

BenchPoint bench_point(const LtiSystem& plant, int T, int T_ini, int N, std::uint64_t seed,
                       int timed_solves, const QpSettings& solver)
{
    const int m = plant.input_dim();
    const int p = plant.output_dim();
    const int L = T_ini + N;

    Box input_law = Box::symmetric(m, 1.0);
    Box noise_law = Box::symmetric(p, 0.0);
    auto [u_d, y_d] = collect_data(plant, T, input_law, noise_law, seed);
    BlockMatrix lib = build_library(u_d, y_d, L);
    ReducedLibrary red = reduce(lib, RankRule::structural(m * L + plant.state_dim()));

    DeepcConfig cfg;
    cfg.T_ini = T_ini;
    cfg.N = N;
    cfg.Q = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p) * N,
                                      static_cast<Eigen::Index>(p) * N);
    cfg.R = 0.01 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m) * N,
                                             static_cast<Eigen::Index>(m) * N);
    cfg.lambda_u = 1e5;
    cfg.lambda_y = 1e4;
    cfg.lambda_g = 10.0;
    cfg.input_constraints.channel_box = Box::symmetric(m, 5.0);
    cfg.output_constraints.channel_box = Box::symmetric(p, 100.0);
    cfg.reference = DeepcConfig::constant_reference(Eigen::VectorXd::Constant(p, 0.5), N);

    // a few warm-up solves are excluded from the statistics
    const int warmup = 2;
    const int steps = timed_solves + warmup;
    ClosedLoopLog full_log = run_closed_loop(plant, partition(lib, T_ini, N, m, p), cfg, steps,
                                             seed, solver, "full");
    ClosedLoopLog red_log = run_closed_loop(plant, partition(red, T_ini, N, m, p), cfg, steps,
                                            seed, solver, "reduced");

    struct Stats
    {
        double mean = 0.0, median = 0.0, p95 = 0.0;
    };
    auto tail_stats = [&](const ClosedLoopLog& log) {
        std::vector<double> times;
        for (size_t i = static_cast<size_t>(warmup); i < log.steps.size(); ++i) {
            if (log.steps[i].solve_ms > 0.0) times.push_back(log.steps[i].solve_ms);
        }
        Stats s;
        if (times.empty()) return s;
        std::sort(times.begin(), times.end());
        for (double v : times) s.mean += v;
        s.mean /= static_cast<double>(times.size());
        s.median = times[times.size() / 2];
        s.p95 = times[static_cast<size_t>(0.95 * static_cast<double>(times.size() - 1))];
        return s;
    };

    BenchPoint point;
    point.T = T;
    point.full_dim = full_log.decision_dim;
    point.reduced_dim = red_log.decision_dim;
    const Stats full_stats = tail_stats(full_log);
    const Stats red_stats = tail_stats(red_log);
    point.mean_full_ms = full_stats.mean;
    point.median_full_ms = full_stats.median;
    point.p95_full_ms = full_stats.p95;
    point.mean_reduced_ms = red_stats.mean;
    point.median_reduced_ms = red_stats.median;
    point.p95_reduced_ms = red_stats.p95;
    point.ratio = point.mean_full_ms > 0.0 ? point.mean_reduced_ms / point.mean_full_ms : 1.0;
    return point;
}

int cmd_bench(const ExperimentConfig& cfg)
{
    LtiSystem plant = cfg.load_plant();
    fs::create_directories(cfg.out_dir);
    QpSettings solver{cfg.solver_tolerance, cfg.solver_max_iterations};

    json report{{"seed", cfg.seed},
                {"config", config_echo_json(cfg)},
                {"kernels_openmp", kernels::openmp_enabled()},
                {"scenario", json::object()},
                {"scaling", json::array()}};

    // configured scenario, full vs reduced
    BenchPoint scenario = bench_point(plant, cfg.T, cfg.T_ini, cfg.N, cfg.seed, 30, solver);
    std::printf("scenario    T=%-5d full dim %-5d mean %8.3f ms | reduced dim %-5d mean %8.3f ms"
                " | ratio %.3f\n",
                scenario.T, scenario.full_dim, scenario.mean_full_ms, scenario.reduced_dim,
                scenario.mean_reduced_ms, scenario.ratio);
    report["scenario"] =
        json{{"T", scenario.T},
             {"full_dim", scenario.full_dim},
             {"reduced_dim", scenario.reduced_dim},
             {"mean_full_ms", scenario.mean_full_ms},
             {"median_full_ms", scenario.median_full_ms},
             {"p95_full_ms", scenario.p95_full_ms},
             {"mean_reduced_ms", scenario.mean_reduced_ms},
             {"median_reduced_ms", scenario.median_reduced_ms},
             {"p95_reduced_ms", scenario.p95_reduced_ms},
             {"ratio", scenario.ratio}};

    // synthetic family: the reduction pays off more as the record grows
    const int family[][2] = {{4, 1}, {4, 2}, {8, 2}};
    for (const auto& dims : family) {
        const int n = dims[0];
        const int m = dims[1];
        LtiSystem synth = suites::random_plant(Rng(cfg.seed).fork(77).seed(), n, m, 2);
        json points = json::array();
        for (int T : {400, 800, 1600}) {
            BenchPoint pt = bench_point(synth, T, 4, 8, cfg.seed, 8, solver);
            std::printf("family n=%d m=%d T=%-5d full dim %-5d mean %8.3f ms | reduced dim %-4d "
                        "mean %8.3f ms | ratio %.3f\n",
                        n, m, pt.T, pt.full_dim, pt.mean_full_ms, pt.reduced_dim,
                        pt.mean_reduced_ms, pt.ratio);
            points.push_back(json{{"T", pt.T},
                                  {"full_dim", pt.full_dim},
                                  {"reduced_dim", pt.reduced_dim},
                                  {"mean_full_ms", pt.mean_full_ms},
                                  {"median_full_ms", pt.median_full_ms},
                                  {"p95_full_ms", pt.p95_full_ms},
                                  {"mean_reduced_ms", pt.mean_reduced_ms},
                                  {"median_reduced_ms", pt.median_reduced_ms},
                                  {"p95_reduced_ms", pt.p95_reduced_ms},
                                  {"ratio", pt.ratio}});
        }
        report["scaling"].push_back(json{{"n", n}, {"m", m}, {"points", points}});
    }

    write_text((fs::path(cfg.out_dir) / "bench_report.json").string(), report.dump(2) + "\n");
    return 0;
}

}  // namespace deepc::experiments
