#include "deepc/reduction.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace deepc {

RankRule RankRule::fixed(int r)
{
    RankRule rule;
    rule.kind = Kind::fixed;
    rule.fixed_r = r;
    return rule;
}

RankRule RankRule::threshold(double rel_tol)
{
    RankRule rule;
    rule.kind = Kind::threshold;
    rule.rel_tol = rel_tol;
    return rule;
}

RankRule RankRule::log_gap(double min_decades, double fallback_rel_tol)
{
    RankRule rule;
    rule.kind = Kind::log_gap;
    rule.min_decades = min_decades;
    rule.fallback_rel_tol = fallback_rel_tol;
    return rule;
}

RankRule RankRule::structural(int ml_plus_n)
{
    RankRule rule;
    rule.kind = Kind::structural;
    rule.ml_plus_n = ml_plus_n;
    return rule;
}

std::string RankRule::describe() const
{
    char buf[96];
    switch (kind) {
        case Kind::fixed:
            std::snprintf(buf, sizeof buf, "fixed(%d)", fixed_r);
            break;
        case Kind::threshold:
            std::snprintf(buf, sizeof buf, "threshold(%.3g)", rel_tol);
            break;
        case Kind::log_gap:
            std::snprintf(buf, sizeof buf, "log_gap(%.3g, fallback=threshold(%.3g))", min_decades,
                          fallback_rel_tol);
            break;
        case Kind::structural:
            std::snprintf(buf, sizeof buf, "structural(%d)", ml_plus_n);
            break;
    }
    return buf;
}

SvdBundle svd(const BlockMatrix& library)
{
    if (library.entries.size() == 0) {
        throw std::invalid_argument("svd: empty library");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> dec(library.entries,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) {
        throw std::runtime_error("svd: decomposition did not converge");
    }
    SvdBundle out;
    out.singular_values = dec.singularValues();
    out.left = dec.matrixU();
    out.right = dec.matrixV();
    out.source_rows = library.rows();
    out.source_cols = library.cols();
    return out;
}

namespace {

int count_above(const Eigen::VectorXd& sigma, double cut)
{
    int count = 0;
    while (count < sigma.size() && sigma(count) > cut) ++count;
    return count;
}

int clip_rank(int r, const SvdBundle& bundle)
{
    const int hi = bundle.count();
    return r < 1 ? 1 : (r > hi ? hi : r);
}

}  // namespace

int select_rank(const SvdBundle& bundle, const RankRule& rule)
{
    const auto& sigma = bundle.singular_values;
    if (sigma.size() == 0 || sigma(0) <= 0.0) {
        throw std::domain_error("zero library");
    }
    switch (rule.kind) {
        case RankRule::Kind::fixed:
            return clip_rank(rule.fixed_r, bundle);

        case RankRule::Kind::threshold:
            return clip_rank(count_above(sigma, rule.rel_tol * sigma(0)), bundle);

        case RankRule::Kind::log_gap: {
            // cut after the widest base-10 gap between consecutive values;
            // a gap onto exact zero counts as infinitely wide
            double best_gap = 0.0;
            int best_index = 0;
            for (int i = 1; i < sigma.size(); ++i) {
                double gap;
                if (sigma(i) <= 0.0) {
                    gap = std::numeric_limits<double>::infinity();
                } else {
                    gap = std::log10(sigma(i - 1)) - std::log10(sigma(i));
                }
                if (gap > best_gap) {
                    best_gap = gap;
                    best_index = i;
                }
                if (std::isinf(gap)) break;
            }
            if (best_index > 0 && best_gap >= rule.min_decades) {
                return best_index;
            }
            return clip_rank(count_above(sigma, rule.fallback_rel_tol * sigma(0)), bundle);
        }

        case RankRule::Kind::structural: {
            const int nonzero = count_above(sigma, kDefaultRankTolerance * sigma(0));
            return clip_rank(std::min(rule.ml_plus_n, nonzero), bundle);
        }
    }
    throw std::logic_error("unreachable rank rule kind");
}

ReducedLibrary reduce(const BlockMatrix& library, const RankRule& rule)
{
    SvdBundle bundle = svd(library);
    const int r = select_rank(bundle, rule);

    ReducedLibrary out;
    out.rank = r;
    out.h_bar = bundle.left.leftCols(r) * bundle.singular_values.head(r).asDiagonal();
    out.v1 = bundle.right.leftCols(r);
    out.retained_singular_values = bundle.singular_values.head(r);
    out.discarded_singular_values = bundle.singular_values.tail(bundle.count() - r);
    out.rank_rule = rule.describe();
    return out;
}

ReducedLibrary truncate_columns(const BlockMatrix& library, int r)
{
    if (r < 1 || r > library.cols()) {
        throw std::invalid_argument("truncate_columns: rank " + std::to_string(r) +
                                    " out of range for " + std::to_string(library.cols()) +
                                    " columns");
    }
    ReducedLibrary out;
    out.rank = r;
    out.h_bar = library.entries.leftCols(r);
    out.v1 = Eigen::MatrixXd::Identity(library.cols(), r);
    out.rank_rule = "truncate_columns(" + std::to_string(r) + ")";
    return out;
}

namespace {

// orthonormal range basis at the given rank tolerance
Eigen::MatrixXd range_basis(const Eigen::MatrixXd& m, double rank_tolerance)
{
    if (m.size() == 0) return Eigen::MatrixXd(m.rows(), 0);
    Eigen::BDCSVD<Eigen::MatrixXd> dec(m, Eigen::ComputeThinU);
    const auto& sigma = dec.singularValues();
    if (sigma.size() == 0 || sigma(0) <= 0.0) return Eigen::MatrixXd(m.rows(), 0);
    const int rank = count_above(sigma, rank_tolerance * sigma(0));
    return dec.matrixU().leftCols(rank);
}

double directed_distance(const Eigen::MatrixXd& Qa, const Eigen::MatrixXd& Qb)
{
    if (Qa.cols() == 0) return 0.0;
    if (Qb.cols() == 0) return 1.0;
    // spectral norm of (I - Qb Qb^T) Qa
    Eigen::MatrixXd residual = Qa - Qb * (Qb.transpose() * Qa);
    Eigen::BDCSVD<Eigen::MatrixXd> dec(residual);
    const double s = dec.singularValues()(0);
    return s > 1.0 ? 1.0 : s;
}

}  // namespace

double range_distance(const BlockMatrix& a, const BlockMatrix& b, double rank_tolerance)
{
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("range_distance: row mismatch " + std::to_string(a.rows()) +
                                    " vs " + std::to_string(b.rows()));
    }
    Eigen::MatrixXd Qa = range_basis(a.entries, rank_tolerance);
    Eigen::MatrixXd Qb = range_basis(b.entries, rank_tolerance);
    return std::max(directed_distance(Qa, Qb), directed_distance(Qb, Qa));
}

void store_spectrum_csv(const Eigen::VectorXd& singular_values, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write spectrum file: " + path);
    }
    out << "index,sigma,log10_sigma\n";
    char buf[64];
    for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
        const double s = singular_values(i);
        const double logs = s > 0.0 ? std::log10(s) : -std::numeric_limits<double>::infinity();
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g", static_cast<long long>(i + 1), s, logs);
        out << buf << "\n";
    }
}

}  // namespace deepc
