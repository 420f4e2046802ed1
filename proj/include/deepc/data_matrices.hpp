#pragma once

#include "deepc/trajectory.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace deepc {

/// Singular values below kDefaultRankTolerance * sigma_max count as zero.
inline constexpr double kDefaultRankTolerance = 1e-9;

enum class Structure { hankel, page, mosaic, unstructured };

std::string to_string(Structure s);

/// Dense block matrix with channel-sized block rows.
struct BlockMatrix
{
    Eigen::MatrixXd entries;
    int block_height = 1;  // channels per block row
    Structure structure = Structure::unstructured;
    int discarded_samples = 0;  // page remainder, zero otherwise

    int rows() const { return static_cast<int>(entries.rows()); }
    int cols() const { return static_cast<int>(entries.cols()); }
};

struct ExcitationReport
{
    int order = 0;
    int required_rank = 0;
    int computed_rank = 0;
    bool satisfied = false;
    double smallest_retained_singular_value = 0.0;
    double rank_tolerance = kDefaultRankTolerance;
    std::string diagnostic;  // non-empty when full row rank is impossible by sizing
};

/// Depth-k block matrix of overlapping windows; column j stacks w(j..j+k-1).
BlockMatrix build_hankel(const Trajectory& w, int depth);

/// Depth-k block matrix of disjoint windows; column j stacks w(jk..jk+k-1).
/// Trailing samples beyond floor(T/k)*k are dropped and counted in
/// discarded_samples.
BlockMatrix build_page(const Trajectory& w, int depth);

/// Horizontal concatenation of per-trajectory Hankel matrices.
BlockMatrix build_mosaic_hankel(const std::vector<Trajectory>& ws, int depth);

/// Two data matrices of equal column count stacked vertically: the input
/// block above the output block.
BlockMatrix stack_input_output(const BlockMatrix& input_part, const BlockMatrix& output_part);

/// Full-row-rank test of the depth-`order` Hankel matrix of w.
ExcitationReport check_persistent_excitation(const Trajectory& w, int order,
                                             double rank_tolerance = kDefaultRankTolerance);

/// Full-row-rank test of the stack of `order` shifted depth-`depth` Page
/// matrices of w.
ExcitationReport check_page_excitation(const Trajectory& w, int depth, int order,
                                       double rank_tolerance = kDefaultRankTolerance);

/// Full-row-rank test of the mosaic-Hankel matrix of the trajectory family.
ExcitationReport check_collective_excitation(const std::vector<Trajectory>& ws, int order,
                                             double rank_tolerance = kDefaultRankTolerance);

/// Euclidean norm of the least-squares residual min_g ||library*g - v||.
/// Zero (to tolerance) certifies that v lies in the library's range.
double membership_residual(const BlockMatrix& library, const Eigen::VectorXd& traj_stack);

/// Count of singular values above rank_tolerance * sigma_max.
int numerical_rank(const Eigen::MatrixXd& m, double rank_tolerance = kDefaultRankTolerance);

}  // namespace deepc
