#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deepc/controller.hpp"
#include "deepc/experiments.hpp"
#include "deepc/rng.hpp"

#include <filesystem>
#include <fstream>

using namespace deepc;

namespace {

struct Scenario
{
    LtiSystem plant;
    LibraryPartition part;
    DeepcConfig cfg;
};

Scenario demo_scenario(std::uint64_t seed, double noise = 0.002)
{
    Scenario s;
    s.plant = experiments::demo_plant();
    auto [u_d, y_d] =
        collect_data(s.plant, 400, Box::symmetric(2, 3.0), Box::symmetric(2, noise), seed);
    BlockMatrix lib = stack_input_output(build_hankel(u_d, 30), build_hankel(y_d, 30));
    s.part = partition(lib, 10, 20, 2, 2);

    s.cfg.T_ini = 10;
    s.cfg.N = 20;
    s.cfg.Q = 35.0 * Eigen::MatrixXd::Identity(40, 40);
    s.cfg.R = 1e-4 * Eigen::MatrixXd::Identity(40, 40);
    s.cfg.lambda_u = 1e6;
    s.cfg.lambda_y = 1e4;
    s.cfg.lambda_g = 100.0;
    s.cfg.input_constraints.channel_box = Box::symmetric(2, 2.0);
    s.cfg.output_constraints.channel_box = Box::symmetric(2, 2.0);
    Eigen::VectorXd sp(2);
    sp << 0.65, 0.77;
    s.cfg.reference = DeepcConfig::constant_reference(sp, 20);
    return s;
}

}  // namespace

TEST_CASE("a plant resting at its reference stays at rest")
{
    Scenario s = demo_scenario(1);
    s.cfg.reference = DeepcConfig::constant_reference(Eigen::VectorXd::Zero(2), 20);
    RecedingHorizonController ctrl(s.part, s.cfg);
    ctrl.initialize_window(Eigen::VectorXd::Zero(20), Eigen::VectorXd::Zero(20));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    auto plant_step = [&](int, const Eigen::VectorXd& u) {
        Eigen::VectorXd y = s.plant.C * x + s.plant.D * u;
        x = s.plant.A * x + s.plant.B * u;
        return y;
    };
    auto recs = ctrl.step(0, plant_step);
    CHECK(recs.size() == 1);
    CHECK(recs[0].u.norm() < 1e-6);
    CHECK(recs[0].stage_cost < 1e-10);
}

TEST_CASE("apply_steps changes how many inputs ship, not the plan")
{
    Scenario s = demo_scenario(2);
    Scenario s2 = demo_scenario(2);
    s2.cfg.apply_steps = 2;

    RecedingHorizonController one(s.part, s.cfg);
    RecedingHorizonController two(s2.part, s2.cfg);
    Eigen::VectorXd u_ini = Eigen::VectorXd::Constant(20, 0.1);
    Eigen::VectorXd y_ini = Eigen::VectorXd::Constant(20, 0.05);
    one.initialize_window(u_ini, y_ini);
    two.initialize_window(u_ini, y_ini);

    Eigen::VectorXd x1 = Eigen::VectorXd::Zero(4);
    LtiSystem plant = s.plant;
    auto step1 = [&](int, const Eigen::VectorXd& u) {
        Eigen::VectorXd y = plant.C * x1 + plant.D * u;
        x1 = plant.A * x1 + plant.B * u;
        return y;
    };
    Eigen::VectorXd x2 = Eigen::VectorXd::Zero(4);
    auto step2 = [&](int, const Eigen::VectorXd& u) {
        Eigen::VectorXd y = plant.C * x2 + plant.D * u;
        x2 = plant.A * x2 + plant.B * u;
        return y;
    };

    auto r1 = one.step(0, step1);
    auto r2 = two.step(0, step2);
    CHECK(r1.size() == 1);
    CHECK(r2.size() == 2);
    CHECK((r1[0].u - r2[0].u).norm() < 1e-9);
}

TEST_CASE("closed loop reaches the setpoint band")
{
    Scenario s = demo_scenario(3);
    ClosedLoopLog log = run_closed_loop(s.plant, s.part, s.cfg, 60, 3);
    REQUIRE(log.steps.size() == 60);
    Eigen::VectorXd sp(2);
    sp << 0.65, 0.77;
    double best = 1e9;
    for (const auto& rec : log.steps) best = std::min(best, (rec.y - sp).norm());
    CHECK(best < 0.02);
    // inputs honored the box
    for (const auto& rec : log.steps) {
        CHECK(rec.u.cwiseAbs().maxCoeff() <= 2.0 + 1e-7);
    }
    CHECK(log.solves == 60);
    CHECK(log.decision_dim == 371);
    CHECK(log.mean_solve_ms > 0.0);
}

TEST_CASE("closed loop is deterministic given the seed")
{
    Scenario s = demo_scenario(4);
    ClosedLoopLog a = run_closed_loop(s.plant, s.part, s.cfg, 25, 7);
    ClosedLoopLog b = run_closed_loop(s.plant, s.part, s.cfg, 25, 7);
    REQUIRE(a.steps.size() == b.steps.size());
    CHECK(a.accumulative_cost == b.accumulative_cost);
    for (size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].u == b.steps[i].u);
        CHECK(a.steps[i].y == b.steps[i].y);
    }

    ClosedLoopLog c = run_closed_loop(s.plant, s.part, s.cfg, 25, 8);
    CHECK(c.accumulative_cost != a.accumulative_cost);
}

TEST_CASE("measurement noise perturbs the loop deterministically")
{
    Scenario s = demo_scenario(8);
    Box noise = Box::symmetric(2, 0.01);
    ClosedLoopLog clean = run_closed_loop(s.plant, s.part, s.cfg, 20, 5);
    ClosedLoopLog noisy = run_closed_loop(s.plant, s.part, s.cfg, 20, 5, {}, "full", &noise);
    ClosedLoopLog again = run_closed_loop(s.plant, s.part, s.cfg, 20, 5, {}, "full", &noise);
    CHECK(noisy.accumulative_cost != clean.accumulative_cost);
    CHECK(noisy.accumulative_cost == again.accumulative_cost);

    Box bad = Box::symmetric(3, 0.01);
    CHECK_THROWS_AS(run_closed_loop(s.plant, s.part, s.cfg, 5, 5, {}, "full", &bad),
                    std::invalid_argument);
}

TEST_CASE("stepping before the window is ready is an error")
{
    Scenario s = demo_scenario(5);
    RecedingHorizonController ctrl(s.part, s.cfg);
    auto plant_step = [](int, const Eigen::VectorXd&) { return Eigen::Vector2d::Zero().eval(); };
    CHECK_THROWS_AS(ctrl.step(0, plant_step), std::logic_error);
    CHECK_THROWS_AS(ctrl.initialize_window(Eigen::VectorXd::Zero(19), Eigen::VectorXd::Zero(20)),
                    std::invalid_argument);
}

TEST_CASE("log csv layout")
{
    Scenario s = demo_scenario(6);
    ClosedLoopLog log = run_closed_loop(s.plant, s.part, s.cfg, 5, 1);
    const std::string path = "controller_log_test.csv";
    log.store_csv(path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,u0,u1,y0,y1,stage_cost,solve_ms,iters");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 5);
    std::filesystem::remove(path);
}

TEST_CASE("current_problem reflects the live window")
{
    Scenario s = demo_scenario(7);
    RecedingHorizonController ctrl(s.part, s.cfg);
    Eigen::VectorXd u_ini = Eigen::VectorXd::Constant(20, 0.2);
    Eigen::VectorXd y_ini = Eigen::VectorXd::Constant(20, -0.1);
    ctrl.initialize_window(u_ini, y_ini);
    QpProblem qp = ctrl.current_problem(0);
    CHECK(qp.u_ini == u_ini);
    CHECK(qp.y_ini == y_ini);
    CHECK(qp.dim() == 371);
    // the controller's cached program solves to the same plan
    QpSolution sol = solve(qp.as_qp_spec());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    LtiSystem plant = s.plant;
    auto plant_step = [&](int, const Eigen::VectorXd& u) {
        Eigen::VectorXd y = plant.C * x + plant.D * u;
        x = plant.A * x + plant.B * u;
        return y;
    };
    auto recs = ctrl.step(0, plant_step);
    CHECK((recs[0].u - qp.recover_u(sol.x).head(2)).norm() < 1e-7);
}
