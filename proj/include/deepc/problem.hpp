#pragma once

#include "deepc/data_matrices.hpp"
#include "deepc/qp_solver.hpp"
#include "deepc/reduction.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace deepc {

/// Past/future split of a stacked input/output data library.
///
/// The source stacks the full input block above the full output block; the
/// split peels the first T_ini block rows and the last N block rows of each.
/// Row semantics drive the split, so reduced (unstructured) libraries
/// partition identically.
struct LibraryPartition
{
    Eigen::MatrixXd Up;  // m*T_ini x cols
    Eigen::MatrixXd Uf;  // m*N     x cols
    Eigen::MatrixXd Yp;  // p*T_ini x cols
    Eigen::MatrixXd Yf;  // p*N     x cols
    int T_ini = 0;
    int N = 0;
    int m = 0;
    int p = 0;

    int cols() const { return static_cast<int>(Up.cols()); }

    /// [Up; Uf; Yp; Yf] — the original library rows (input stack above
    /// output stack), which is also the weight-block order.
    Eigen::MatrixXd restack() const;
};

LibraryPartition partition(const BlockMatrix& library, int T_ini, int N, int m, int p);
LibraryPartition partition(const ReducedLibrary& reduced, int T_ini, int N, int m, int p);

/// Horizon-stacked polytope: either a per-channel box replicated over the
/// horizon or an explicit linear system G z <= h on the stacked signal.
struct StackedConstraint
{
    std::optional<Box> channel_box;
    std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> general;

    bool empty() const { return !channel_box && !general; }
};

struct DeepcConfig
{
    int T_ini = 0;
    int N = 0;
    Eigen::MatrixXd Q;  // pN x pN, symmetric PSD
    Eigen::MatrixXd R;  // mN x mN, symmetric PSD
    double lambda_u = 0.0;
    double lambda_y = 0.0;
    double lambda_g = 0.0;
    StackedConstraint input_constraints;
    StackedConstraint output_constraints;
    int apply_steps = 1;  // l < N inputs applied per solve
    std::function<Eigen::VectorXd(int)> reference;  // t -> stacked pN target

    /// Constant-setpoint reference stack.
    static std::function<Eigen::VectorXd(int)> constant_reference(const Eigen::VectorXd& setpoint,
                                                                  int N);

    /// Throws std::invalid_argument when dimensions or signs are off.
    void validate(int m, int p) const;
};

/// Condensed quadratic program over the library coefficients g:
///     min ||H_L g - b||_P^2 + lambda_g ||g||^2   s.t.   C g <= c,
/// expanded to hessian/linear form with the (u, y, sigma) recovery maps.
struct QpProblem
{
    Eigen::MatrixXd hessian;  // 2 (H_L^T P H_L + lambda_g I)
    Eigen::VectorXd linear;   // -2 H_L^T P b
    double constant = 0.0;    // b^T P b
    Eigen::MatrixXd C;
    Eigen::VectorXd c;

    LibraryPartition lib;
    Eigen::VectorXd u_ini, y_ini, y_ref, b;
    double lambda_g = 0.0;

    int dim() const { return static_cast<int>(linear.size()); }

    Eigen::VectorXd recover_u(const Eigen::VectorXd& g) const { return lib.Uf * g; }
    Eigen::VectorXd recover_y(const Eigen::VectorXd& g) const { return lib.Yf * g; }
    Eigen::VectorXd recover_sigma_u(const Eigen::VectorXd& g) const
    {
        return lib.Up * g - u_ini;
    }
    Eigen::VectorXd recover_sigma_y(const Eigen::VectorXd& g) const
    {
        return lib.Yp * g - y_ini;
    }

    QpSpec as_qp_spec() const { return QpSpec{hessian, linear, C, c, std::nullopt}; }
    double objective(const Eigen::VectorXd& g) const;
};

QpProblem assemble_full(const LibraryPartition& lib, const DeepcConfig& cfg,
                        const Eigen::VectorXd& u_ini, const Eigen::VectorXd& y_ini,
                        const Eigen::VectorXd& y_ref);

QpProblem assemble_reduced(const LibraryPartition& reduced_lib, const DeepcConfig& cfg,
                           const Eigen::VectorXd& u_ini, const Eigen::VectorXd& y_ini,
                           const Eigen::VectorXd& y_ref);

struct KktReport
{
    double stationarity = 0.0;
    double complementarity = 0.0;
    double infeasibility = 0.0;
    double min_dual = 0.0;  // most negative multiplier, >= 0 when dual feasible
};

KktReport kkt_residuals(const QpProblem& problem, const Eigen::VectorXd& g,
                        const Eigen::VectorXd& mu);

/// Solution-equivalence check between a problem and its reduced counterpart:
/// (a) the reduced minimizer equals the transferred full minimizer,
/// (b) the recovered (u, y, sigma_u, sigma_y) agree,
/// (c) the library images H_L g* and Hbar_L gbar* agree.
struct EquivalenceReport
{
    bool hypothesis_ok = false;
    std::string hypothesis_note;
    double g_transfer_error = 0.0;
    double trajectory_error = 0.0;
    double image_error = 0.0;
    double g_norm = 0.0;
    bool transfer_ok = false;
    bool trajectory_ok = false;
    bool image_ok = false;

    bool passed() const
    {
        return hypothesis_ok && transfer_ok && trajectory_ok && image_ok;
    }
};

EquivalenceReport verify_equivalence(const QpProblem& full, const QpProblem& reduced,
                                  const Eigen::MatrixXd& V1, double tol,
                                  const QpSettings& settings = {});

}  // namespace deepc
