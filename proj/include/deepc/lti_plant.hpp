#pragma once

#include "deepc/data_matrices.hpp"
#include "deepc/trajectory.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace deepc {

/// Discrete-time state-space system x(t+1) = A x(t) + B u(t), y = C x + D u.
struct LtiSystem
{
    Eigen::MatrixXd A;  // n x n
    Eigen::MatrixXd B;  // n x m
    Eigen::MatrixXd C;  // p x n
    Eigen::MatrixXd D;  // p x m

    int state_dim() const { return static_cast<int>(A.rows()); }
    int input_dim() const { return static_cast<int>(B.cols()); }
    int output_dim() const { return static_cast<int>(C.rows()); }

    /// Throws std::invalid_argument on inconsistent dimensions.
    void validate() const;

    bool is_controllable(double rank_tolerance = kDefaultRankTolerance) const;

    /// Key/value text format with matrix literals; doubles are printed with
    /// 17 significant digits so load(store(x)) is bit-exact.
    static LtiSystem load(const std::string& path);
    void store(const std::string& path) const;
};

/// Factors of the data-matrix factorization: the block lower-triangular
/// convolution matrix (pL x mL, D blocks on the diagonal) and the extended
/// observability matrix (pL x n).
struct StructuralFactors
{
    Eigen::MatrixXd convolution;
    Eigen::MatrixXd observability;
    int depth = 0;
};

struct SimulationResult
{
    Trajectory state;   // x(0..T-1)
    Trajectory output;  // y(0..T-1)
    Eigen::VectorXd final_state;  // x(T)
};

SimulationResult simulate(const LtiSystem& sys, const Eigen::VectorXd& x0, const Trajectory& u);

/// Excitation data recorded from the plant: i.i.d. uniform inputs drawn from
/// input_law and outputs perturbed by i.i.d. uniform noise from noise_law.
/// Deterministic given the seed; noise enters the recorded outputs only.
std::pair<Trajectory, Trajectory> collect_data(const LtiSystem& sys, int T, const Box& input_law,
                                               const Box& noise_law, std::uint64_t seed,
                                               const Eigen::VectorXd* x0 = nullptr);

/// Smallest l such that [C; CA; ...; CA^(l-1)] has rank n, or nullopt when no
/// l <= n achieves it (unobservable system).
std::optional<int> observability_index(const LtiSystem& sys,
                                       double rank_tolerance = kDefaultRankTolerance);

StructuralFactors structural_factors(const LtiSystem& sys, int depth);

}  // namespace deepc
