#pragma once

#include "deepc/lti_plant.hpp"
#include "deepc/problem.hpp"
#include "deepc/qp_solver.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace deepc {

struct StepRecord
{
    int t = 0;
    Eigen::VectorXd u;
    Eigen::VectorXd y;
    double stage_cost = 0.0;
    double solve_ms = 0.0;  // attributed to the step where the solve happened
    int iterations = 0;
};

struct ClosedLoopLog
{
    std::vector<StepRecord> steps;
    double accumulative_cost = 0.0;
    double mean_solve_ms = 0.0;
    double median_solve_ms = 0.0;
    int decision_dim = 0;
    int solves = 0;
    std::uint64_t seed = 0;
    std::string variant;

    /// CSV layout: "t,u0,..,y0,..,stage_cost,solve_ms,iters".
    void store_csv(const std::string& path) const;
};

/// Receding-horizon controller over a fixed data library.
///
/// The quadratic term, constraint system and their factors depend only on
/// the library and weights, so they are assembled once; each step rebuilds
/// the linear term from the sliding window, solves, and applies the first
/// apply_steps inputs. Instances are single-threaded and stateful; distinct
/// instances are independent.
class RecedingHorizonController
{
 public:
    /// plant callback: measured output for the input applied at time t.
    using PlantStep = std::function<Eigen::VectorXd(int t, const Eigen::VectorXd& u)>;

    RecedingHorizonController(LibraryPartition lib, DeepcConfig cfg, QpSettings solver = {});

    /// Seeds the T_ini window (lengths m*T_ini and p*T_ini).
    void initialize_window(const Eigen::VectorXd& u_ini, const Eigen::VectorXd& y_ini);

    bool window_ready() const { return window_ready_; }
    int decision_dim() const { return lib_.cols(); }
    const LibraryPartition& library() const { return lib_; }
    const DeepcConfig& config() const { return cfg_; }

    /// Assembles and solves the window's program, applies the first
    /// apply_steps inputs through the plant, slides the window, and returns
    /// one record per applied input. Throws std::runtime_error when the
    /// solver fails.
    std::vector<StepRecord> step(int t, const PlantStep& plant);

    /// The assembled program for the current window (test/inspection hook).
    QpProblem current_problem(int t) const;

 private:
    Eigen::VectorXd assemble_rhs(int t) const;  // b for the current window

    LibraryPartition lib_;
    DeepcConfig cfg_;
    QpSettings solver_;

    Eigen::MatrixXd hessian_;
    Eigen::MatrixXd C_;
    Eigen::VectorXd c_;
    Eigen::MatrixXd weighted_rows_;  // P * [Up;Uf;Yp;Yf], for the linear term
    Eigen::VectorXd u_window_;       // most recent m*T_ini inputs
    Eigen::VectorXd y_window_;       // most recent p*T_ini outputs
    Eigen::VectorXd warm_g_;
    bool window_ready_ = false;
};

/// Closed-loop simulation of a controller against an LTI plant from a zero
/// initial state. The window is populated by T_ini warm-up steps with small
/// seeded inputs drawn inside the input box before control starts. When
/// measurement_noise is given, seeded uniform noise perturbs every output
/// the controller sees (and logs); the plant state itself stays clean.
/// Deterministic given the seed (timing fields aside).
ClosedLoopLog run_closed_loop(const LtiSystem& plant, const LibraryPartition& lib,
                              const DeepcConfig& cfg, int steps, std::uint64_t seed,
                              const QpSettings& solver = {}, const std::string& variant = "full",
                              const Box* measurement_noise = nullptr);

}  // namespace deepc
