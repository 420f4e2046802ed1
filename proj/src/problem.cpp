#include "deepc/problem.hpp"

#include "deepc/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace deepc {

Eigen::MatrixXd LibraryPartition::restack() const
{
    Eigen::MatrixXd out(Up.rows() + Uf.rows() + Yp.rows() + Yf.rows(), cols());
    Eigen::Index row = 0;
    for (const Eigen::MatrixXd* block : {&Up, &Uf, &Yp, &Yf}) {
        out.middleRows(row, block->rows()) = *block;
        row += block->rows();
    }
    return out;
}

LibraryPartition partition(const BlockMatrix& library, int T_ini, int N, int m, int p)
{
    if (T_ini < 1 || N < 1 || m < 1 || p < 1) {
        throw std::invalid_argument("partition: T_ini, N, m, p must be positive");
    }
    const int L = T_ini + N;
    const Eigen::Index expected = static_cast<Eigen::Index>(m + p) * L;
    if (library.rows() != expected) {
        throw std::invalid_argument("partition: library has " + std::to_string(library.rows()) +
                                    " rows, expected (m+p)(T_ini+N) = " +
                                    std::to_string(expected));
    }
    LibraryPartition part;
    part.T_ini = T_ini;
    part.N = N;
    part.m = m;
    part.p = p;
    const auto& H = library.entries;
    const Eigen::Index mL = static_cast<Eigen::Index>(m) * L;  // u-stack height
    part.Up = H.topRows(static_cast<Eigen::Index>(m) * T_ini);
    part.Uf = H.middleRows(static_cast<Eigen::Index>(m) * T_ini, static_cast<Eigen::Index>(m) * N);
    part.Yp = H.middleRows(mL, static_cast<Eigen::Index>(p) * T_ini);
    part.Yf = H.bottomRows(static_cast<Eigen::Index>(p) * N);
    return part;
}

LibraryPartition partition(const ReducedLibrary& reduced, int T_ini, int N, int m, int p)
{
    return partition(reduced.as_block(m + p), T_ini, N, m, p);
}

std::function<Eigen::VectorXd(int)> DeepcConfig::constant_reference(
    const Eigen::VectorXd& setpoint, int N)
{
    Eigen::VectorXd stack(setpoint.size() * N);
    for (int i = 0; i < N; ++i) {
        stack.segment(i * setpoint.size(), setpoint.size()) = setpoint;
    }
    return [stack](int) { return stack; };
}

void DeepcConfig::validate(int m, int p) const
{
    if (T_ini < 1 || N < 1) {
        throw std::invalid_argument("config: T_ini and N must be positive");
    }
    if (Q.rows() != static_cast<Eigen::Index>(p) * N || Q.rows() != Q.cols()) {
        throw std::invalid_argument("config: Q must be pN x pN");
    }
    if (R.rows() != static_cast<Eigen::Index>(m) * N || R.rows() != R.cols()) {
        throw std::invalid_argument("config: R must be mN x mN");
    }
    const double q_scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    const double r_scale = std::max(1.0, R.cwiseAbs().maxCoeff());
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * q_scale ||
        (R - R.transpose()).cwiseAbs().maxCoeff() > 1e-10 * r_scale) {
        throw std::invalid_argument("config: Q and R must be symmetric");
    }
    if (!(lambda_u > 0.0) || !(lambda_y > 0.0) || !(lambda_g > 0.0)) {
        throw std::invalid_argument("config: lambda_u, lambda_y, lambda_g must be positive");
    }
    if (apply_steps < 1 || apply_steps >= N) {
        throw std::invalid_argument("config: apply_steps must satisfy 1 <= l < N");
    }
    if (input_constraints.channel_box && input_constraints.channel_box->size() != m) {
        throw std::invalid_argument("config: input box must have m channels");
    }
    if (output_constraints.channel_box && output_constraints.channel_box->size() != p) {
        throw std::invalid_argument("config: output box must have p channels");
    }
    if (!reference) {
        throw std::invalid_argument("config: reference generator not set");
    }
}

namespace {

bool is_diagonal(const Eigen::MatrixXd& m)
{
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    Eigen::MatrixXd off = m;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

// rows of C g <= c coming from one stacked constraint acting through `map`
void append_constraint_rows(const StackedConstraint& con, const Eigen::MatrixXd& map, int channels,
                            int horizon, std::vector<Eigen::MatrixXd>& C_blocks,
                            std::vector<Eigen::VectorXd>& c_blocks)
{
    if (con.channel_box) {
        Eigen::VectorXd hi(static_cast<Eigen::Index>(channels) * horizon);
        Eigen::VectorXd lo(hi.size());
        for (int i = 0; i < horizon; ++i) {
            hi.segment(static_cast<Eigen::Index>(i) * channels, channels) = con.channel_box->hi;
            lo.segment(static_cast<Eigen::Index>(i) * channels, channels) = con.channel_box->lo;
        }
        C_blocks.push_back(map);
        c_blocks.push_back(hi);
        C_blocks.push_back(-map);
        c_blocks.push_back(-lo);
    }
    if (con.general) {
        const auto& [G, h] = *con.general;
        if (G.cols() != map.rows() || G.rows() != h.size()) {
            throw std::invalid_argument("general constraint shape mismatch");
        }
        C_blocks.push_back(G * map);
        c_blocks.push_back(h);
    }
}

QpProblem assemble(const LibraryPartition& lib, const DeepcConfig& cfg,
                   const Eigen::VectorXd& u_ini, const Eigen::VectorXd& y_ini,
                   const Eigen::VectorXd& y_ref)
{
    cfg.validate(lib.m, lib.p);
    const int mT = lib.m * lib.T_ini;
    const int mN = lib.m * lib.N;
    const int pT = lib.p * lib.T_ini;
    const int pN = lib.p * lib.N;
    if (u_ini.size() != mT || y_ini.size() != pT || y_ref.size() != pN) {
        throw std::invalid_argument("assemble: window sizes must be m*T_ini / p*T_ini / p*N");
    }
    if (cfg.T_ini != lib.T_ini || cfg.N != lib.N) {
        throw std::invalid_argument("assemble: config horizons do not match the partition");
    }

    QpProblem qp;
    qp.lib = lib;
    qp.u_ini = u_ini;
    qp.y_ini = y_ini;
    qp.y_ref = y_ref;
    qp.lambda_g = cfg.lambda_g;

    Eigen::MatrixXd Hs = lib.restack();
    qp.b.resize(Hs.rows());
    qp.b << u_ini, Eigen::VectorXd::Zero(mN), y_ini, y_ref;

    // weight P = blkdiag(lambda_u I, R, lambda_y I, Q); diagonal fast path
    const bool diagonal_weights = is_diagonal(cfg.Q) && is_diagonal(cfg.R);
    Eigen::VectorXd Pb;
    if (diagonal_weights) {
        Eigen::VectorXd w(Hs.rows());
        w.head(mT).setConstant(cfg.lambda_u);
        w.segment(mT, mN) = cfg.R.diagonal();
        w.segment(mT + mN, pT).setConstant(cfg.lambda_y);
        w.tail(pN) = cfg.Q.diagonal();
        qp.hessian = 2.0 * kernels::weighted_gram(Hs, w);
        Pb = w.cwiseProduct(qp.b);
    } else {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(Hs.rows(), Hs.rows());
        P.topLeftCorner(mT, mT) = cfg.lambda_u * Eigen::MatrixXd::Identity(mT, mT);
        P.block(mT, mT, mN, mN) = cfg.R;
        P.block(mT + mN, mT + mN, pT, pT) = cfg.lambda_y * Eigen::MatrixXd::Identity(pT, pT);
        P.bottomRightCorner(pN, pN) = cfg.Q;
        qp.hessian = 2.0 * kernels::weighted_gram(Hs, P);
        Pb = P * qp.b;
    }
    qp.hessian.diagonal().array() += 2.0 * cfg.lambda_g;
    qp.linear = -2.0 * (Hs.transpose() * Pb);
    qp.constant = qp.b.dot(Pb);

    std::vector<Eigen::MatrixXd> C_blocks;
    std::vector<Eigen::VectorXd> c_blocks;
    append_constraint_rows(cfg.input_constraints, lib.Uf, lib.m, lib.N, C_blocks, c_blocks);
    append_constraint_rows(cfg.output_constraints, lib.Yf, lib.p, lib.N, C_blocks, c_blocks);
    Eigen::Index n_rows = 0;
    for (const auto& blk : C_blocks) n_rows += blk.rows();
    qp.C.resize(n_rows, lib.cols());
    qp.c.resize(n_rows);
    Eigen::Index at = 0;
    for (size_t i = 0; i < C_blocks.size(); ++i) {
        qp.C.middleRows(at, C_blocks[i].rows()) = C_blocks[i];
        qp.c.segment(at, c_blocks[i].size()) = c_blocks[i];
        at += C_blocks[i].rows();
    }
    return qp;
}

}  // namespace

QpProblem assemble_full(const LibraryPartition& lib, const DeepcConfig& cfg,
                        const Eigen::VectorXd& u_ini, const Eigen::VectorXd& y_ini,
                        const Eigen::VectorXd& y_ref)
{
    return assemble(lib, cfg, u_ini, y_ini, y_ref);
}

QpProblem assemble_reduced(const LibraryPartition& reduced_lib, const DeepcConfig& cfg,
                           const Eigen::VectorXd& u_ini, const Eigen::VectorXd& y_ini,
                           const Eigen::VectorXd& y_ref)
{
    return assemble(reduced_lib, cfg, u_ini, y_ini, y_ref);
}

double QpProblem::objective(const Eigen::VectorXd& g) const
{
    return 0.5 * g.dot(hessian * g) + linear.dot(g) + constant;
}

KktReport kkt_residuals(const QpProblem& problem, const Eigen::VectorXd& g,
                        const Eigen::VectorXd& mu)
{
    if (g.size() != problem.dim() || mu.size() != problem.C.rows()) {
        throw std::invalid_argument("kkt_residuals: dimension mismatch");
    }
    KktReport report;
    Eigen::VectorXd grad = problem.hessian * g + problem.linear;
    if (mu.size() > 0) {
        grad.noalias() += problem.C.transpose() * mu;
        Eigen::VectorXd slack = problem.C * g - problem.c;
        report.complementarity = std::abs(mu.dot(slack));
        report.infeasibility = slack.cwiseMax(0.0).norm();
        report.min_dual = mu.minCoeff();
    }
    report.stationarity = grad.norm();
    return report;
}

EquivalenceReport verify_equivalence(const QpProblem& full, const QpProblem& reduced,
                                  const Eigen::MatrixXd& V1, double tol,
                                  const QpSettings& settings)
{
    EquivalenceReport report;

    // hypothesis gate: V1 orthonormal, matching dimensions, equal ranges
    if (V1.rows() != full.dim() || V1.cols() != reduced.dim()) {
        report.hypothesis_note = "transfer map shape does not link the two problems";
        return report;
    }
    const Eigen::MatrixXd gram =
        V1.transpose() * V1 - Eigen::MatrixXd::Identity(V1.cols(), V1.cols());
    if (gram.cwiseAbs().maxCoeff() > 1e-8) {
        report.hypothesis_note = "V1 columns are not orthonormal";
        return report;
    }
    Eigen::MatrixXd Hs = full.lib.restack();
    const double range_defect = (Hs - (Hs * V1) * V1.transpose()).norm();
    if (range_defect > 1e-6 * (1.0 + Hs.norm())) {
        report.hypothesis_note =
            "hypothesis violated: reduced library does not span the source range "
            "(retained rank below the numerical rank)";
        return report;
    }
    report.hypothesis_ok = true;

    QpSolution sol_full = solve(full.as_qp_spec(), settings);
    QpSolution sol_reduced = solve(reduced.as_qp_spec(), settings);
    if (sol_full.status != QpStatus::optimal || sol_reduced.status != QpStatus::optimal) {
        throw std::runtime_error("verify_equivalence: solver failed (" +
                                 to_string(sol_full.status) + " / " +
                                 to_string(sol_reduced.status) + ")");
    }

    const Eigen::VectorXd transferred = V1.transpose() * sol_full.x;
    report.g_norm = sol_full.x.norm();
    report.g_transfer_error = (sol_reduced.x - transferred).norm();
    report.transfer_ok = report.g_transfer_error <= tol * (1.0 + report.g_norm);

    auto block_error = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return (a - b).norm() / (1.0 + a.norm());
    };
    double worst = 0.0;
    worst = std::max(worst, block_error(full.recover_u(sol_full.x), reduced.recover_u(sol_reduced.x)));
    worst = std::max(worst, block_error(full.recover_y(sol_full.x), reduced.recover_y(sol_reduced.x)));
    worst = std::max(worst, block_error(full.recover_sigma_u(sol_full.x),
                                        reduced.recover_sigma_u(sol_reduced.x)));
    worst = std::max(worst, block_error(full.recover_sigma_y(sol_full.x),
                                        reduced.recover_sigma_y(sol_reduced.x)));
    report.trajectory_error = worst;
    report.trajectory_ok = worst <= tol;

    const Eigen::VectorXd image_full = Hs * sol_full.x;
    const Eigen::VectorXd image_reduced = reduced.lib.restack() * sol_reduced.x;
    report.image_error = (image_full - image_reduced).norm();
    report.image_ok = report.image_error <= tol * (1.0 + image_full.norm());
    return report;
}

}  // namespace deepc
