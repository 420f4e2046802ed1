#pragma once

#include "deepc/data_matrices.hpp"

#include <Eigen/Core>

#include <string>

namespace deepc {

/// Thin SVD of a data library. Only the top min(rows, cols) triplets are
/// kept; the trailing right-singular block is never materialized.
struct SvdBundle
{
    Eigen::VectorXd singular_values;  // non-increasing
    Eigen::MatrixXd left;             // rows x k, orthonormal columns
    Eigen::MatrixXd right;            // cols x k, orthonormal columns
    int source_rows = 0;
    int source_cols = 0;

    int count() const { return static_cast<int>(singular_values.size()); }
};

/// Retained-rank selection policy.
///
/// fixed(r)        keep r columns (clipped to the valid range);
/// threshold(tol)  keep singular values above tol * sigma_1;
/// log_gap(d)      cut at the largest base-10 gap between consecutive
///                 singular values, requiring at least d decades, otherwise
///                 fall back to threshold(fallback_rel_tol);
/// structural(k)   keep min(k, nonzero count), with k = mL + n.
struct RankRule
{
    enum class Kind { fixed, threshold, log_gap, structural };

    Kind kind = Kind::log_gap;
    int fixed_r = 0;
    double rel_tol = 1e-6;
    double min_decades = 1.0;
    int ml_plus_n = 0;
    double fallback_rel_tol = 1e-6;

    static RankRule fixed(int r);
    static RankRule threshold(double rel_tol);
    static RankRule log_gap(double min_decades = 1.0, double fallback_rel_tol = 1e-6);
    static RankRule structural(int ml_plus_n);

    std::string describe() const;
};

/// Rank-r library sharing the source's dominant range space, together with
/// the right-singular transfer map needed to carry solutions between the
/// full and reduced problems.
struct ReducedLibrary
{
    Eigen::MatrixXd h_bar;  // rows x r, equals source * v1 and W1 * Sigma1
    Eigen::MatrixXd v1;     // source_cols x r, orthonormal columns
    int rank = 0;
    Eigen::VectorXd retained_singular_values;
    Eigen::VectorXd discarded_singular_values;
    std::string rank_rule;

    BlockMatrix as_block(int block_height) const
    {
        return BlockMatrix{h_bar, block_height, Structure::unstructured, 0};
    }
};

SvdBundle svd(const BlockMatrix& library);

/// Throws std::domain_error("zero library") on an all-zero spectrum.
int select_rank(const SvdBundle& bundle, const RankRule& rule);

ReducedLibrary reduce(const BlockMatrix& library, const RankRule& rule);

/// Baseline that keeps the first r raw columns instead of singular vectors.
ReducedLibrary truncate_columns(const BlockMatrix& library, int r);

/// Largest principal-angle sine between the column spaces of a and b
/// (0 = identical ranges, 1 = some direction of one space orthogonal to the
/// other). Symmetric in its arguments.
double range_distance(const BlockMatrix& a, const BlockMatrix& b,
                      double rank_tolerance = kDefaultRankTolerance);

/// CSV export "index,sigma,log10_sigma" for spectrum plots.
void store_spectrum_csv(const Eigen::VectorXd& singular_values, const std::string& path);

}  // namespace deepc
