#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace deepc {

/// Strictly convex quadratic program
///     min_x 1/2 x^T H x + f^T x   s.t.   A x <= b.
struct QpSpec
{
    Eigen::MatrixXd H;  // symmetric positive definite
    Eigen::VectorXd f;
    Eigen::MatrixXd A;  // may have zero rows
    Eigen::VectorXd b;
    std::optional<Eigen::VectorXd> warm_x;  // speed hint only

    int dim() const { return static_cast<int>(f.size()); }
    int constraint_count() const { return static_cast<int>(A.rows()); }
};

enum class QpStatus { optimal, max_iter, numerical_error };

std::string to_string(QpStatus s);

struct QpResiduals
{
    double stationarity = 0.0;    // ||H x + f + A^T mu||
    double complementarity = 0.0; // |mu^T (A x - b)|
    double infeasibility = 0.0;   // ||max(A x - b, 0)||
};

struct QpSolution
{
    Eigen::VectorXd x;
    Eigen::VectorXd mu;  // one multiplier per constraint row, zero when inactive
    double objective = 0.0;
    QpStatus status = QpStatus::numerical_error;
    QpResiduals residuals;
    int iterations = 0;
    double wall_time_ms = 0.0;
    /// Negated dual objective after each accepted step; non-increasing.
    std::vector<double> merit_history;
};

struct QpSettings
{
    double tolerance = 1e-8;
    int max_iterations = 10000;
};

/// Dual active-set solve. status == optimal guarantees KKT residuals within
/// the configured tolerance; max_iter / numerical_error carry the best
/// iterate found. Never throws on dimensionally valid input.
QpSolution solve(const QpSpec& spec, const QpSettings& settings = {});

/// Fast path ignoring the inequality system: x = -H^{-1} f.
QpSolution solve_unconstrained(const QpSpec& spec, const QpSettings& settings = {});

}  // namespace deepc
