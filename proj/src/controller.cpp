#include "deepc/controller.hpp"

#include "deepc/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace deepc {

namespace {

// P * Hs, kept so the linear term -2 (P Hs)^T b can be rebuilt per step
Eigen::MatrixXd weighted_restack(const LibraryPartition& lib, const DeepcConfig& cfg)
{
    Eigen::MatrixXd Hs = lib.restack();
    const int mT = lib.m * lib.T_ini;
    const int mN = lib.m * lib.N;
    const int pT = lib.p * lib.T_ini;
    const int pN = lib.p * lib.N;
    Eigen::MatrixXd out(Hs.rows(), Hs.cols());
    out.topRows(mT) = cfg.lambda_u * Hs.topRows(mT);
    out.middleRows(mT, mN) = cfg.R * Hs.middleRows(mT, mN);
    out.middleRows(mT + mN, pT) = cfg.lambda_y * Hs.middleRows(mT + mN, pT);
    out.bottomRows(pN) = cfg.Q * Hs.bottomRows(pN);
    return out;
}

}  // namespace

RecedingHorizonController::RecedingHorizonController(LibraryPartition lib, DeepcConfig cfg,
                                                     QpSettings solver)
    : lib_(std::move(lib)), cfg_(std::move(cfg)), solver_(solver)
{
    cfg_.validate(lib_.m, lib_.p);
    // constant parts of the program: quadratic term and constraint system
    const Eigen::VectorXd zero_u = Eigen::VectorXd::Zero(lib_.m * lib_.T_ini);
    const Eigen::VectorXd zero_y = Eigen::VectorXd::Zero(lib_.p * lib_.T_ini);
    const Eigen::VectorXd zero_ref = Eigen::VectorXd::Zero(lib_.p * lib_.N);
    QpProblem base = assemble_full(lib_, cfg_, zero_u, zero_y, zero_ref);
    hessian_ = std::move(base.hessian);
    C_ = std::move(base.C);
    c_ = std::move(base.c);
    weighted_rows_ = weighted_restack(lib_, cfg_);
}

void RecedingHorizonController::initialize_window(const Eigen::VectorXd& u_ini,
                                                  const Eigen::VectorXd& y_ini)
{
    if (u_ini.size() != lib_.m * lib_.T_ini || y_ini.size() != lib_.p * lib_.T_ini) {
        throw std::invalid_argument("window sizes must be m*T_ini and p*T_ini");
    }
    u_window_ = u_ini;
    y_window_ = y_ini;
    window_ready_ = true;
}

Eigen::VectorXd RecedingHorizonController::assemble_rhs(int t) const
{
    Eigen::VectorXd b(weighted_rows_.rows());
    b << u_window_, Eigen::VectorXd::Zero(lib_.m * lib_.N), y_window_, cfg_.reference(t);
    return b;
}

QpProblem RecedingHorizonController::current_problem(int t) const
{
    if (!window_ready_) {
        throw std::logic_error("controller window not initialized");
    }
    return assemble_full(lib_, cfg_, u_window_, y_window_, cfg_.reference(t));
}

std::vector<StepRecord> RecedingHorizonController::step(int t, const PlantStep& plant)
{
    if (!window_ready_) {
        throw std::logic_error("controller window not initialized");
    }
    const auto start = std::chrono::steady_clock::now();
    Eigen::VectorXd b = assemble_rhs(t);
    QpSpec spec;
    spec.H = hessian_;  // solver reads only; shallow sharing not worth the aliasing risk
    spec.f = -2.0 * (weighted_rows_.transpose() * b);
    spec.A = C_;
    spec.b = c_;
    if (warm_g_.size() == spec.dim()) spec.warm_x = warm_g_;
    QpSolution sol = solve(spec, solver_);
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    if (sol.status != QpStatus::optimal) {
        throw std::runtime_error("receding-horizon solve failed at t=" + std::to_string(t) +
                                 ": status=" + to_string(sol.status) +
                                 ", stationarity=" + std::to_string(sol.residuals.stationarity) +
                                 ", infeasibility=" + std::to_string(sol.residuals.infeasibility));
    }
    warm_g_ = sol.x;

    const int m = lib_.m;
    const int p = lib_.p;
    const Eigen::VectorXd u_plan = lib_.Uf * sol.x;
    const Eigen::MatrixXd Q_step = cfg_.Q.topLeftCorner(p, p);
    const Eigen::MatrixXd R_step = cfg_.R.topLeftCorner(m, m);

    std::vector<StepRecord> records;
    records.reserve(cfg_.apply_steps);
    for (int k = 0; k < cfg_.apply_steps; ++k) {
        StepRecord rec;
        rec.t = t + k;
        rec.u = u_plan.segment(static_cast<Eigen::Index>(k) * m, m);
        rec.y = plant(t + k, rec.u);
        const Eigen::VectorXd y_target = cfg_.reference(t + k).head(p);
        const Eigen::VectorXd err = rec.y - y_target;
        rec.stage_cost = err.dot(Q_step * err) + rec.u.dot(R_step * rec.u);
        rec.solve_ms = k == 0 ? elapsed_ms : 0.0;
        rec.iterations = k == 0 ? sol.iterations : 0;

        // slide the T_ini window forward
        const Eigen::Index mu_t = u_window_.size() - m;
        u_window_.head(mu_t) = u_window_.tail(mu_t).eval();
        u_window_.tail(m) = rec.u;
        const Eigen::Index py_t = y_window_.size() - p;
        y_window_.head(py_t) = y_window_.tail(py_t).eval();
        y_window_.tail(p) = rec.y;

        records.push_back(std::move(rec));
    }
    return records;
}

ClosedLoopLog run_closed_loop(const LtiSystem& plant, const LibraryPartition& lib,
                              const DeepcConfig& cfg, int steps, std::uint64_t seed,
                              const QpSettings& solver, const std::string& variant,
                              const Box* measurement_noise)
{
    if (steps < 1) {
        throw std::invalid_argument("closed loop needs steps >= 1");
    }
    plant.validate();
    if (plant.input_dim() != lib.m || plant.output_dim() != lib.p) {
        throw std::invalid_argument("plant dimensions do not match the library");
    }
    if (measurement_noise &&
        (measurement_noise->size() != lib.p || !measurement_noise->valid())) {
        throw std::invalid_argument("measurement noise box must cover the output channels");
    }

    RecedingHorizonController ctrl(lib, cfg, solver);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(plant.state_dim());
    Rng noise_rng = Rng(seed).fork(0x6d656173);  // independent measurement stream
    auto plant_step = [&](int, const Eigen::VectorXd& u) {
        Eigen::VectorXd y = plant.C * x + plant.D * u;
        x = plant.A * x + plant.B * u;
        if (measurement_noise) {
            for (int ch = 0; ch < lib.p; ++ch) {
                y(ch) += noise_rng.uniform(measurement_noise->lo(ch), measurement_noise->hi(ch));
            }
        }
        return y;
    };

    // warm-up: T_ini soft-start steps with small seeded inputs inside the box,
    // drawn from the band between the box center and part of the way to the
    // upper bound (30% band) so the plant enters the controlled phase moving off rest
    Rng rng(seed);
    const Box input_box =
        cfg.input_constraints.channel_box.value_or(Box::symmetric(lib.m, 1.0));
    Eigen::VectorXd u_ini(lib.m * lib.T_ini);
    Eigen::VectorXd y_ini(lib.p * lib.T_ini);
    for (int k = 0; k < lib.T_ini; ++k) {
        Eigen::VectorXd u(lib.m);
        for (int ch = 0; ch < lib.m; ++ch) {
            const double center = 0.5 * (input_box.lo(ch) + input_box.hi(ch));
            u(ch) = rng.uniform(center, center + 0.3 * (input_box.hi(ch) - center));
        }
        u_ini.segment(static_cast<Eigen::Index>(k) * lib.m, lib.m) = u;
        y_ini.segment(static_cast<Eigen::Index>(k) * lib.p, lib.p) = plant_step(k - lib.T_ini, u);
    }
    ctrl.initialize_window(u_ini, y_ini);

    ClosedLoopLog log;
    log.seed = seed;
    log.variant = variant;
    log.decision_dim = ctrl.decision_dim();
    std::vector<double> solve_times;
    for (int t = 0; t < steps; t += cfg.apply_steps) {
        auto records = ctrl.step(t, plant_step);
        for (auto& rec : records) {
            if (rec.t >= steps) break;
            log.accumulative_cost += rec.stage_cost;
            if (rec.solve_ms > 0.0) solve_times.push_back(rec.solve_ms);
            log.steps.push_back(std::move(rec));
        }
    }
    log.solves = static_cast<int>(solve_times.size());
    if (!solve_times.empty()) {
        double total = 0.0;
        for (double v : solve_times) total += v;
        log.mean_solve_ms = total / static_cast<double>(solve_times.size());
        std::sort(solve_times.begin(), solve_times.end());
        log.median_solve_ms = solve_times[solve_times.size() / 2];
    }
    return log;
}

void ClosedLoopLog::store_csv(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write log file: " + path);
    }
    const int m = steps.empty() ? 0 : static_cast<int>(steps.front().u.size());
    const int p = steps.empty() ? 0 : static_cast<int>(steps.front().y.size());
    out << "t";
    for (int i = 0; i < m; ++i) out << ",u" << i;
    for (int i = 0; i < p; ++i) out << ",y" << i;
    out << ",stage_cost,solve_ms,iters\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ',' << buf;
    };
    for (const auto& rec : steps) {
        out << rec.t;
        for (int i = 0; i < m; ++i) put(rec.u(i));
        for (int i = 0; i < p; ++i) put(rec.y(i));
        put(rec.stage_cost);
        put(rec.solve_ms);
        out << ',' << rec.iterations << "\n";
    }
}

}  // namespace deepc
