#pragma once

#include "deepc/controller.hpp"
#include "deepc/lti_plant.hpp"
#include "deepc/reduction.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace deepc::experiments {

/// Declarative experiment description loaded from a JSON config file.
/// Every report echoes the raw config so runs are auditable without
/// external state.
struct ExperimentConfig
{
    std::string plant_file;

    // offline collection
    int T = 400;
    Box input_box;
    Box noise_box;

    // horizons and weights
    int T_ini = 10;
    int N = 20;
    Eigen::MatrixXd Q;  // pN x pN (built from a scale or a full matrix)
    Eigen::MatrixXd R;  // mN x mN
    double lambda_u = 1e6;
    double lambda_y = 1e4;
    double lambda_g = 1e2;

    // constraints and reference
    Box u_box;
    Box y_box;
    Eigen::VectorXd setpoint;  // per-step output target
    Box run_noise;             // closed-loop measurement noise (zero box = off)

    RankRule rank_rule;
    bool truncation_baseline = false;

    std::string variant = "both";  // full | reduced | both
    int run_steps = 100;
    int apply_steps = 1;
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    double solver_tolerance = 1e-8;
    int solver_max_iterations = 10000;

    std::string config_echo;  // raw file contents

    static ExperimentConfig load(const std::string& path);

    LtiSystem load_plant() const;
    DeepcConfig controller_config(const LtiSystem& plant) const;
};

/// Command entry points; return process exit codes (0 ok, 1 suite failure,
/// 2 config/IO error).
int cmd_init(const std::string& out_dir);
int cmd_collect(const ExperimentConfig& cfg);
int cmd_reduce(const ExperimentConfig& cfg);
int cmd_run(const ExperimentConfig& cfg);
int cmd_check(const ExperimentConfig& cfg);
int cmd_bench(const ExperimentConfig& cfg);

/// Full vs reduced per-step solve timing on one plant/record length.
struct BenchPoint
{
    int T = 0;
    int full_dim = 0;
    int reduced_dim = 0;
    double mean_full_ms = 0.0;
    double median_full_ms = 0.0;
    double p95_full_ms = 0.0;
    double mean_reduced_ms = 0.0;
    double median_reduced_ms = 0.0;
    double p95_reduced_ms = 0.0;
    double ratio = 1.0;
};

BenchPoint bench_point(const LtiSystem& plant, int T, int T_ini, int N, std::uint64_t seed,
                       int timed_solves, const QpSettings& solver);

/// The bundled two-input two-output demonstration plant.
LtiSystem demo_plant();

/// FNV-1a content hash used in collection manifests.
std::string file_hash_hex(const std::string& path);

}  // namespace deepc::experiments
