#include "deepc/data_matrices.hpp"

#include "deepc/kernels.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <stdexcept>

namespace deepc {

std::string to_string(Structure s)
{
    switch (s) {
        case Structure::hankel: return "hankel";
        case Structure::page: return "page";
        case Structure::mosaic: return "mosaic";
        case Structure::unstructured: return "unstructured";
    }
    return "unstructured";
}

BlockMatrix build_hankel(const Trajectory& w, int depth)
{
    if (depth < 1 || depth > w.length()) {
        throw std::invalid_argument("hankel depth " + std::to_string(depth) +
                                    " out of range for trajectory length " +
                                    std::to_string(w.length()));
    }
    const int ch = w.channels();
    BlockMatrix out;
    out.entries.resize(static_cast<Eigen::Index>(ch) * depth, w.length() - depth + 1);
    kernels::hankel_gather(w.data(), depth, out.entries);
    out.block_height = ch;
    out.structure = Structure::hankel;
    return out;
}

BlockMatrix build_page(const Trajectory& w, int depth)
{
    if (depth < 1 || depth > w.length()) {
        throw std::invalid_argument("page depth " + std::to_string(depth) +
                                    " out of range for trajectory length " +
                                    std::to_string(w.length()));
    }
    const int ch = w.channels();
    const int n_cols = w.length() / depth;
    BlockMatrix out;
    out.entries.resize(static_cast<Eigen::Index>(ch) * depth, n_cols);
    for (int j = 0; j < n_cols; ++j) {
        out.entries.col(j) = w.stacked(j * depth, depth);
    }
    out.block_height = ch;
    out.structure = Structure::page;
    out.discarded_samples = w.length() - n_cols * depth;
    return out;
}

BlockMatrix build_mosaic_hankel(const std::vector<Trajectory>& ws, int depth)
{
    if (ws.empty()) {
        throw std::invalid_argument("mosaic: no trajectories given");
    }
    const int ch = ws.front().channels();
    Eigen::Index total_cols = 0;
    for (size_t i = 0; i < ws.size(); ++i) {
        if (ws[i].channels() != ch) {
            throw std::invalid_argument("mosaic: trajectory " + std::to_string(i) + " has " +
                                        std::to_string(ws[i].channels()) + " channels, expected " +
                                        std::to_string(ch));
        }
        if (ws[i].length() < depth) {
            throw std::invalid_argument("mosaic: trajectory " + std::to_string(i) + " of length " +
                                        std::to_string(ws[i].length()) +
                                        " is shorter than depth " + std::to_string(depth));
        }
        total_cols += ws[i].length() - depth + 1;
    }
    BlockMatrix out;
    out.entries.resize(static_cast<Eigen::Index>(ch) * depth, total_cols);
    Eigen::Index col = 0;
    for (const auto& w : ws) {
        const Eigen::Index n = w.length() - depth + 1;
        kernels::hankel_gather(w.data(), depth, out.entries.middleCols(col, n));
        col += n;
    }
    out.block_height = ch;
    out.structure = Structure::mosaic;
    return out;
}

BlockMatrix stack_input_output(const BlockMatrix& input_part, const BlockMatrix& output_part)
{
    if (input_part.cols() != output_part.cols()) {
        throw std::invalid_argument("stack: column mismatch " + std::to_string(input_part.cols()) +
                                    " vs " + std::to_string(output_part.cols()));
    }
    BlockMatrix out;
    out.entries.resize(input_part.rows() + output_part.rows(), input_part.cols());
    out.entries.topRows(input_part.rows()) = input_part.entries;
    out.entries.bottomRows(output_part.rows()) = output_part.entries;
    out.block_height = input_part.block_height + output_part.block_height;
    out.structure = input_part.structure == output_part.structure ? input_part.structure
                                                                  : Structure::unstructured;
    out.discarded_samples = input_part.discarded_samples + output_part.discarded_samples;
    return out;
}

int numerical_rank(const Eigen::MatrixXd& m, double rank_tolerance)
{
    if (m.size() == 0) return 0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
    const double cut = rank_tolerance * sigma(0);
    int rank = 0;
    while (rank < sigma.size() && sigma(rank) > cut) ++rank;
    return rank;
}

namespace {

ExcitationReport rank_report(const Eigen::MatrixXd& matrix, int order, int required_rank,
                             double rank_tolerance, const std::string& shortfall)
{
    ExcitationReport report;
    report.order = order;
    report.required_rank = required_rank;
    report.rank_tolerance = rank_tolerance;
    report.diagnostic = shortfall;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix);
    const auto& sigma = svd.singularValues();
    if (sigma.size() > 0 && sigma(0) > 0.0) {
        const double cut = rank_tolerance * sigma(0);
        int rank = 0;
        while (rank < sigma.size() && sigma(rank) > cut) ++rank;
        report.computed_rank = rank;
        report.smallest_retained_singular_value = rank > 0 ? sigma(rank - 1) : 0.0;
    }
    report.satisfied = report.computed_rank == required_rank;
    return report;
}

std::string column_shortfall(Eigen::Index cols, int required)
{
    if (cols >= required) return {};
    return "full row rank impossible: " + std::to_string(cols) + " columns < required rank " +
           std::to_string(required) + "; collect more data";
}

}  // namespace

ExcitationReport check_persistent_excitation(const Trajectory& w, int order, double rank_tolerance)
{
    if (order < 1 || order > w.length()) {
        throw std::invalid_argument("excitation order " + std::to_string(order) +
                                    " out of range for trajectory length " +
                                    std::to_string(w.length()));
    }
    BlockMatrix h = build_hankel(w, order);
    const int required = w.channels() * order;
    std::string shortfall = column_shortfall(h.cols(), required);
    if (!shortfall.empty()) {
        // the Hankel column count T-k+1 must reach m*k, i.e. T >= (m+1)k - 1
        shortfall += " (need T >= " + std::to_string((w.channels() + 1) * order - 1) + ", have " +
                     std::to_string(w.length()) + ")";
    }
    return rank_report(h.entries, order, required, rank_tolerance, shortfall);
}

ExcitationReport check_page_excitation(const Trajectory& w, int depth, int order,
                                       double rank_tolerance)
{
    if (depth < 1 || order < 1 || w.length() < depth * order) {
        throw std::invalid_argument("page excitation needs T >= depth*order, got T=" +
                                    std::to_string(w.length()) + ", depth=" +
                                    std::to_string(depth) + ", order=" + std::to_string(order));
    }
    // stack of shifted Page matrices; each shift covers the same sub-length
    const int sub_len = w.length() - depth * (order - 1);
    const int n_cols = sub_len / depth;
    const int ch = w.channels();
    Eigen::MatrixXd stacked(static_cast<Eigen::Index>(ch) * depth * order, n_cols);
    for (int t = 0; t < order; ++t) {
        BlockMatrix block = build_page(w.segment(depth * t, sub_len), depth);
        stacked.middleRows(static_cast<Eigen::Index>(t) * ch * depth, ch * depth) = block.entries;
    }
    const int required = ch * depth * order;
    return rank_report(stacked, order, required, rank_tolerance,
                       column_shortfall(n_cols, required));
}

ExcitationReport check_collective_excitation(const std::vector<Trajectory>& ws, int order,
                                             double rank_tolerance)
{
    BlockMatrix mosaic = build_mosaic_hankel(ws, order);
    const int required = ws.front().channels() * order;
    return rank_report(mosaic.entries, order, required, rank_tolerance,
                       column_shortfall(mosaic.cols(), required));
}

double membership_residual(const BlockMatrix& library, const Eigen::VectorXd& traj_stack)
{
    if (traj_stack.size() != library.rows()) {
        throw std::invalid_argument("membership: stacked trajectory of length " +
                                    std::to_string(traj_stack.size()) +
                                    " does not match library rows " +
                                    std::to_string(library.rows()));
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(library.entries);
    Eigen::VectorXd g = cod.solve(traj_stack);
    return (library.entries * g - traj_stack).norm();
}

}  // namespace deepc
