#include "deepc/suites.hpp"

#include "deepc/controller.hpp"
#include "deepc/problem.hpp"
#include "deepc/qp_solver.hpp"
#include "deepc/reduction.hpp"
#include "deepc/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deepc::suites {

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double magnitude = 1.0)
{
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            m(i, j) = rng.uniform(-magnitude, magnitude);
        }
    }
    return m;
}

Eigen::VectorXd random_vector(Rng& rng, int size, double magnitude = 1.0)
{
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) v(i) = rng.uniform(-magnitude, magnitude);
    return v;
}

double spectral_radius(const Eigen::MatrixXd& A)
{
    return A.eigenvalues().cwiseAbs().maxCoeff();
}

Trajectory random_input(Rng& rng, int channels, int length, double magnitude = 1.0)
{
    return Trajectory(random_matrix(rng, channels, length, magnitude));
}

}  // namespace

LtiSystem random_plant(std::uint64_t seed, int n, int m, int p)
{
    for (int attempt = 0; attempt < 64; ++attempt) {
        Rng rng = Rng(seed).fork(static_cast<std::uint64_t>(attempt));
        LtiSystem sys;
        sys.A = random_matrix(rng, n, n);
        const double radius = spectral_radius(sys.A);
        if (radius > 0.0) sys.A *= rng.uniform(0.55, 0.95) / radius;
        sys.B = random_matrix(rng, n, m);
        sys.C = random_matrix(rng, p, n);
        sys.D = random_matrix(rng, p, m, 0.3);
        if (sys.is_controllable() && observability_index(sys).has_value()) {
            return sys;
        }
    }
    throw std::runtime_error("random_plant: could not draw a controllable/observable system");
}

namespace {

// noise-free excitation data, redrawn on the measure-zero rank failure
Trajectory exciting_input(Rng& rng, const LtiSystem& sys, int order, int T)
{
    for (int attempt = 0; attempt < 8; ++attempt) {
        Trajectory u = random_input(rng, sys.input_dim(), T);
        if (check_persistent_excitation(u, order).satisfied) return u;
    }
    throw std::runtime_error("exciting_input: persistent excitation not reached");
}

BlockMatrix noise_free_library(const LtiSystem& sys, const Trajectory& u, int L)
{
    SimulationResult sim = simulate(sys, Eigen::VectorXd::Zero(sys.state_dim()), u);
    return stack_input_output(build_hankel(u, L), build_hankel(sim.output, L));
}

}  // namespace

SuiteResult membership_suite(std::uint64_t seed, int trials, double tolerance)
{
    SuiteResult result;
    result.name = "membership";
    result.tolerance = tolerance;
    Rng master(seed);

    struct Setup
    {
        LtiSystem sys;
        int L;
        BlockMatrix hankel, page, mosaic;
    };
    std::vector<Setup> setups;
    const int dims[][3] = {{2, 1, 1}, {3, 1, 2}, {2, 2, 1}};
    for (int s = 0; s < 3; ++s) {
        Setup setup;
        setup.sys = random_plant(master.fork(900 + s).seed(), dims[s][0], dims[s][1], dims[s][2]);
        const int n = setup.sys.state_dim();
        const int m = setup.sys.input_dim();
        setup.L = n + 3;
        const int L = setup.L;
        Rng rng = master.fork(1000 + s);

        // Hankel library under persistent excitation of order n+L
        {
            const int T = (m + 1) * (n + L) - 1 + 10;
            Trajectory u = exciting_input(rng, setup.sys, n + L, T);
            setup.hankel = noise_free_library(setup.sys, u, L);
        }
        // Page library under depth-L excitation of order n+1
        {
            const int T = L * ((m * L + 1) * (n + 1) - 1) + L;
            for (int attempt = 0; attempt < 8; ++attempt) {
                Trajectory u = random_input(rng, m, T);
                if (!check_page_excitation(u, L, n + 1).satisfied) continue;
                SimulationResult sim = simulate(setup.sys, Eigen::VectorXd::Zero(n), u);
                setup.page = stack_input_output(build_page(u, L), build_page(sim.output, L));
                break;
            }
            if (setup.page.cols() == 0) {
                result.note = "page excitation could not be reached";
                return result;
            }
        }
        // mosaic library from short records under collective excitation
        {
            const int q = 3;
            const int each = std::max(L + n, ((m + q) * (L + n) - q) / q + 4);
            for (int attempt = 0; attempt < 8; ++attempt) {
                std::vector<Trajectory> us, stacks;
                for (int i = 0; i < q; ++i) us.push_back(random_input(rng, m, each));
                if (!check_collective_excitation(us, n + L).satisfied) continue;
                std::vector<Trajectory> ys;
                for (const auto& u : us) {
                    ys.push_back(simulate(setup.sys, Eigen::VectorXd::Zero(n), u).output);
                }
                setup.mosaic = stack_input_output(build_mosaic_hankel(us, L),
                                                  build_mosaic_hankel(ys, L));
                break;
            }
            if (setup.mosaic.cols() == 0) {
                result.note = "collective excitation could not be reached";
                return result;
            }
        }
        setups.push_back(std::move(setup));
    }

    std::vector<double> worst(static_cast<size_t>(trials), 0.0);
    std::vector<int> failed(static_cast<size_t>(trials), 0);
#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < trials; ++trial) {
        try {
            const Setup& setup = setups[static_cast<size_t>(trial) % setups.size()];
            Rng rng = Rng(seed).fork(2000 + static_cast<std::uint64_t>(trial));
            const int n = setup.sys.state_dim();
            Eigen::VectorXd x0 = random_vector(rng, n);
            Trajectory u = random_input(rng, setup.sys.input_dim(), setup.L);
            SimulationResult sim = simulate(setup.sys, x0, u);
            Eigen::VectorXd stack(setup.hankel.rows());
            stack << u.stacked(), sim.output.stacked();
            const double scale = 1.0 + stack.norm();
            for (const BlockMatrix* lib : {&setup.hankel, &setup.page, &setup.mosaic}) {
                const double rel = membership_residual(*lib, stack) / scale;
                worst[trial] = std::max(worst[trial], rel);
                if (rel > tolerance) failed[trial] = 1;
            }
        } catch (const std::exception&) {
            failed[trial] = 1;
        }
    }
    result.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        result.failures += failed[static_cast<size_t>(trial)];
        result.worst = std::max(result.worst, worst[static_cast<size_t>(trial)]);
    }
    return result;
}

SuiteResult rank_bound_suite(std::uint64_t seed, int trials)
{
    SuiteResult result;
    result.name = "rank_bound";
    result.trials = trials;
    Rng master(seed);
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = master.fork(static_cast<std::uint64_t>(trial));
        const int n = rng.uniform_int(2, 4);
        const int m = rng.uniform_int(1, 2);
        const int p = rng.uniform_int(1, 2);
        LtiSystem sys = random_plant(rng.next_u64(), n, m, p);
        const int obs = observability_index(sys).value();
        const int L = obs + rng.uniform_int(2, 4);
        const int T = (m + 1) * (n + L) - 1 + rng.uniform_int(5, 25);
        Trajectory u = exciting_input(rng, sys, n + L, T);
        BlockMatrix lib = noise_free_library(sys, u, L);

        const int rank = numerical_rank(lib.entries);
        const int bound = m * L + n;
        bool ok = rank == bound && rank <= bound;
        // column surplus: the reduction is worth at least m*n columns
        ok = ok && (lib.cols() - rank >= m * n);
        result.worst = std::max(result.worst, static_cast<double>(std::abs(rank - bound)));
        if (!ok) ++result.failures;
    }
    return result;
}

SuiteResult factorization_suite(std::uint64_t seed, int plants, double tolerance)
{
    SuiteResult result;
    result.name = "factorization";
    result.trials = plants;
    result.tolerance = tolerance;
    Rng master(seed);
    for (int trial = 0; trial < plants; ++trial) {
        Rng rng = master.fork(static_cast<std::uint64_t>(trial));
        const int n = rng.uniform_int(2, 5);
        const int m = rng.uniform_int(1, 2);
        const int p = rng.uniform_int(1, 2);
        LtiSystem sys = random_plant(rng.next_u64(), n, m, p);
        const int L = rng.uniform_int(3, 8);
        const int T = L + rng.uniform_int(20, 50);

        Trajectory u = random_input(rng, m, T);
        SimulationResult sim = simulate(sys, random_vector(rng, n), u);

        BlockMatrix lhs = stack_input_output(build_hankel(u, L), build_hankel(sim.output, L));
        StructuralFactors factors = structural_factors(sys, L);

        const Eigen::Index mL = static_cast<Eigen::Index>(m) * L;
        Eigen::MatrixXd factor(lhs.rows(), mL + n);
        factor.topLeftCorner(mL, mL) = Eigen::MatrixXd::Identity(mL, mL);
        factor.topRightCorner(mL, n).setZero();
        factor.bottomLeftCorner(static_cast<Eigen::Index>(p) * L, mL) = factors.convolution;
        factor.bottomRightCorner(static_cast<Eigen::Index>(p) * L, n) = factors.observability;

        Eigen::MatrixXd state_row = sim.state.data().leftCols(T - L + 1);
        Eigen::MatrixXd rhs_inner(mL + n, T - L + 1);
        rhs_inner.topRows(mL) = build_hankel(u, L).entries;
        rhs_inner.bottomRows(n) = state_row;

        const double rel = (lhs.entries - factor * rhs_inner).norm() / lhs.entries.norm();
        result.worst = std::max(result.worst, rel);
        if (rel > tolerance) ++result.failures;
    }
    return result;
}

SuiteResult equivalence_suite(std::uint64_t seed, int instances, double tolerance, double lambda_u,
                           double lambda_y, double lambda_g)
{
    SuiteResult result;
    result.name = "equivalence";
    result.tolerance = tolerance;
    if (!(lambda_u > 0.0) || !(lambda_y > 0.0) || !(lambda_g > 0.0)) {
        result.note = "hypothesis violated: lambda_u, lambda_y, lambda_g must be positive";
        return result;
    }

    std::vector<double> worst(static_cast<size_t>(instances), 0.0);
    std::vector<int> failed(static_cast<size_t>(instances), 0);
#pragma omp parallel for schedule(dynamic)
    for (int inst = 0; inst < instances; ++inst) {
        Rng rng = Rng(seed).fork(static_cast<std::uint64_t>(inst));
        const int n = rng.uniform_int(2, 6);
        const int m = rng.uniform_int(1, 2);
        const int p = rng.uniform_int(1, 2);
        LtiSystem sys = random_plant(rng.next_u64(), n, m, p);
        const int obs = observability_index(sys).value();
        const int T_ini = std::max(obs, 2);
        const int N = rng.uniform_int(4, 8);
        const int L = T_ini + N;
        const int T = (m + 1) * (n + L) - 1 + rng.uniform_int(5, 20);

        try {
            Trajectory u = exciting_input(rng, sys, n + L, T);
            BlockMatrix lib = noise_free_library(sys, u, L);
            ReducedLibrary red = reduce(lib, RankRule::threshold(kDefaultRankTolerance));

            LibraryPartition full_part = partition(lib, T_ini, N, m, p);
            LibraryPartition red_part = partition(red, T_ini, N, m, p);

            // window from an independent prefix run
            Trajectory u_pre = random_input(rng, m, T_ini);
            SimulationResult pre = simulate(sys, random_vector(rng, n), u_pre);

            DeepcConfig cfg;
            cfg.T_ini = T_ini;
            cfg.N = N;
            cfg.Q = rng.uniform(1.0, 30.0) *
                    Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p) * N, static_cast<Eigen::Index>(p) * N);
            cfg.R = rng.uniform(0.001, 1.0) *
                    Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m) * N, static_cast<Eigen::Index>(m) * N);
            cfg.lambda_u = lambda_u * std::pow(10.0, rng.uniform(-1.0, 1.0));
            cfg.lambda_y = lambda_y * std::pow(10.0, rng.uniform(-1.0, 1.0));
            cfg.lambda_g = lambda_g * std::pow(10.0, rng.uniform(-1.0, 1.0));
            Eigen::VectorXd setpoint = random_vector(rng, p);
            cfg.reference = DeepcConfig::constant_reference(setpoint, N);

            // every other instance tightens the input box until it binds
            cfg.input_constraints.channel_box = Box::symmetric(m, 50.0);
            cfg.output_constraints.channel_box = Box::symmetric(p, 50.0);
            const Eigen::VectorXd u_ini = u_pre.stacked();
            const Eigen::VectorXd y_ini = pre.output.stacked();
            const Eigen::VectorXd y_ref = cfg.reference(0);
            if (inst % 2 == 1) {
                QpProblem wide = assemble_full(full_part, cfg, u_ini, y_ini, y_ref);
                QpSolution free_sol = solve_unconstrained(wide.as_qp_spec());
                const double peak = wide.recover_u(free_sol.x).cwiseAbs().maxCoeff();
                cfg.input_constraints.channel_box = Box::symmetric(m, std::max(0.05, 0.6 * peak));
            }

            QpProblem full = assemble_full(full_part, cfg, u_ini, y_ini, y_ref);
            QpProblem reduced = assemble_reduced(red_part, cfg, u_ini, y_ini, y_ref);
            EquivalenceReport report = verify_equivalence(full, reduced, red.v1, tolerance);

            worst[inst] = std::max({report.g_transfer_error / (1.0 + report.g_norm),
                                    report.trajectory_error, report.image_error});
            if (!report.passed()) failed[inst] = 1;
        } catch (const std::exception&) {
            failed[inst] = 1;
        }
    }
    result.trials = instances;
    for (int inst = 0; inst < instances; ++inst) {
        result.failures += failed[static_cast<size_t>(inst)];
        result.worst = std::max(result.worst, worst[static_cast<size_t>(inst)]);
    }
    return result;
}

SuiteResult kkt_suite(std::uint64_t seed, int instances, double tolerance)
{
    SuiteResult result;
    result.name = "kkt";
    result.trials = instances;
    result.tolerance = tolerance;
    Rng master(seed);
    for (int inst = 0; inst < instances; ++inst) {
        Rng rng = master.fork(static_cast<std::uint64_t>(inst));
        const int d = rng.uniform_int(2, 8);
        const int k = rng.uniform_int(0, 6);
        Eigen::MatrixXd M = random_matrix(rng, d, d);
        QpSpec spec;
        spec.H = M.transpose() * M + 0.1 * Eigen::MatrixXd::Identity(d, d);
        spec.f = random_vector(rng, d, 2.0);
        spec.A = random_matrix(rng, k, d);
        spec.b.resize(k);
        const Eigen::VectorXd anchor = random_vector(rng, d);
        for (int i = 0; i < k; ++i) {
            spec.b(i) = spec.A.row(i).dot(anchor) + rng.uniform(0.05, 1.5);  // anchor stays feasible
        }
        QpSolution sol = solve(spec, QpSettings{tolerance, 10000});
        const double res = std::max({sol.residuals.stationarity, sol.residuals.complementarity,
                                     sol.residuals.infeasibility});
        result.worst = std::max(result.worst, res);
        const double scale = 1.0 + spec.f.cwiseAbs().maxCoeff() +
                             (k > 0 ? spec.b.cwiseAbs().maxCoeff() : 0.0);
        if (sol.status != QpStatus::optimal || res > tolerance * scale) ++result.failures;
    }
    return result;
}

SuiteResult excitation_suite(std::uint64_t seed, int trials)
{
    SuiteResult result;
    result.name = "excitation";
    result.trials = trials;
    Rng master(seed);
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = master.fork(static_cast<std::uint64_t>(trial));
        const int n = rng.uniform_int(2, 4);
        const int m = rng.uniform_int(1, 2);
        const int L = rng.uniform_int(4, 8);
        const int order = n + L;
        const int T_min = (m + 1) * order - 1;  // data-length bound for order n+L

        Trajectory long_u = random_input(rng, m, T_min + rng.uniform_int(0, 10));
        ExcitationReport ok_report = check_persistent_excitation(long_u, order);

        Trajectory short_u = random_input(rng, m, T_min - 1 - rng.uniform_int(0, 3));
        ExcitationReport short_report = check_persistent_excitation(short_u, order);

        const bool ok = ok_report.satisfied && !short_report.satisfied &&
                        !short_report.diagnostic.empty();
        if (!ok) ++result.failures;
    }
    return result;
}

std::vector<SuiteResult> run_all(std::uint64_t seed, double lambda_u, double lambda_y,
                                 double lambda_g)
{
    Rng master(seed);
    std::vector<SuiteResult> out;
    out.push_back(membership_suite(master.fork(1).seed(), 100));
    out.push_back(rank_bound_suite(master.fork(2).seed(), 20));
    out.push_back(factorization_suite(master.fork(3).seed(), 10));
    out.push_back(equivalence_suite(master.fork(4).seed(), 50, 1e-6, lambda_u, lambda_y, lambda_g));
    out.push_back(kkt_suite(master.fork(5).seed(), 100));
    out.push_back(excitation_suite(master.fork(6).seed(), 20));
    return out;
}

}  // namespace deepc::suites
