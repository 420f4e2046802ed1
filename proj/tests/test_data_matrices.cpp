#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deepc/data_matrices.hpp"
#include "deepc/lti_plant.hpp"
#include "deepc/rng.hpp"
#include "oracles.hpp"

#include <cstdio>
#include <filesystem>

using namespace deepc;

namespace {

Trajectory scalar_traj(std::initializer_list<double> values)
{
    Eigen::MatrixXd m(1, static_cast<Eigen::Index>(values.size()));
    int i = 0;
    for (double v : values) m(0, i++) = v;
    return Trajectory(std::move(m));
}

Trajectory random_traj(Rng& rng, int channels, int length, double magnitude = 1.0)
{
    Trajectory w(channels, length);
    for (int t = 0; t < length; ++t) {
        for (int c = 0; c < channels; ++c) w.at(c, t) = rng.uniform(-magnitude, magnitude);
    }
    return w;
}

}  // namespace

TEST_CASE("hankel of a scalar ramp")
{
    BlockMatrix h = build_hankel(scalar_traj({1, 2, 3, 4}), 2);
    Eigen::MatrixXd expected(2, 3);
    expected << 1, 2, 3, 2, 3, 4;
    CHECK(h.entries == expected);
    CHECK(h.block_height == 1);
    CHECK(h.structure == Structure::hankel);

    BlockMatrix row = build_hankel(scalar_traj({1, 2, 3}), 1);
    CHECK(row.rows() == 1);
    CHECK(row.entries(0, 0) == 1);
    CHECK(row.entries(0, 2) == 3);
}

TEST_CASE("hankel of a two-channel trajectory follows the index rule")
{
    Rng rng(3);
    Trajectory w = random_traj(rng, 2, 5);
    BlockMatrix h = build_hankel(w, 3);
    CHECK(h.rows() == 6);
    CHECK(h.cols() == 3);
    CHECK(h.entries.col(0) == w.stacked(0, 3));
    for (int col = 0; col < h.cols(); ++col) {
        for (int blk = 0; blk < 3; ++blk) {
            for (int ch = 0; ch < 2; ++ch) {
                CHECK(h.entries(blk * 2 + ch, col) ==
                      oracles::window_entry(w, 3, 1, blk, ch, col));
            }
        }
    }
}

TEST_CASE("hankel depth errors name both values")
{
    CHECK_THROWS_WITH_AS(build_hankel(scalar_traj({1, 2}), 3),
                         doctest::Contains("depth 3"), std::invalid_argument);
}

TEST_CASE("page drops the remainder")
{
    BlockMatrix pg = build_page(scalar_traj({1, 2, 3, 4, 5}), 2);
    Eigen::MatrixXd expected(2, 2);
    expected << 1, 3, 2, 4;
    CHECK(pg.entries == expected);
    CHECK(pg.discarded_samples == 1);

    BlockMatrix single = build_page(scalar_traj({1, 2, 3, 4}), 4);
    CHECK(single.cols() == 1);
    CHECK(single.entries.col(0) == Eigen::Vector4d(1, 2, 3, 4));
    CHECK(single.discarded_samples == 0);
}

TEST_CASE("page of a two-channel trajectory has disjoint columns")
{
    Rng rng(5);
    Trajectory w = random_traj(rng, 2, 12);
    BlockMatrix pg = build_page(w, 3);
    CHECK(pg.rows() == 6);
    CHECK(pg.cols() == 4);
    for (int col = 0; col < 4; ++col) {
        for (int blk = 0; blk < 3; ++blk) {
            for (int ch = 0; ch < 2; ++ch) {
                CHECK(pg.entries(blk * 2 + ch, col) ==
                      oracles::window_entry(w, 3, 3, blk, ch, col));
            }
        }
    }
}

TEST_CASE("mosaic concatenates per-trajectory hankels")
{
    Rng rng(7);
    Trajectory w = random_traj(rng, 2, 9);
    BlockMatrix single = build_mosaic_hankel({w}, 4);
    CHECK(single.entries == build_hankel(w, 4).entries);

    BlockMatrix doubled = build_mosaic_hankel({w, w}, 4);
    CHECK(doubled.cols() == 2 * single.cols());
    CHECK(doubled.entries.leftCols(single.cols()) == doubled.entries.rightCols(single.cols()));

    std::vector<Trajectory> ws = {random_traj(rng, 1, 8), random_traj(rng, 1, 9),
                                  random_traj(rng, 1, 10)};
    BlockMatrix mosaic = build_mosaic_hankel(ws, 4);
    CHECK(mosaic.cols() == (8 - 4 + 1) + (9 - 4 + 1) + (10 - 4 + 1));
    CHECK(mosaic.structure == Structure::mosaic);
}

TEST_CASE("mosaic names the offending trajectory on channel mismatch")
{
    Rng rng(9);
    std::vector<Trajectory> ws = {random_traj(rng, 2, 8), random_traj(rng, 3, 8)};
    CHECK_THROWS_WITH_AS(build_mosaic_hankel(ws, 3), doctest::Contains("trajectory 1"),
                         std::invalid_argument);
}

TEST_CASE("hankel shift property")
{
    Rng rng(11);
    Trajectory w = random_traj(rng, 2, 25);
    const int k = 6;
    BlockMatrix h = build_hankel(w, k);
    BlockMatrix shifted = build_hankel(w.segment(1, w.length() - 1), k);
    for (int j = 0; j + 1 < h.cols(); ++j) {
        CHECK(h.entries.col(j + 1) == shifted.entries.col(j));
    }
}

TEST_CASE("column counts on randomized dimensions")
{
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const int ch = rng.uniform_int(1, 3);
        const int T = rng.uniform_int(6, 40);
        const int k = rng.uniform_int(1, T);
        Trajectory w = random_traj(rng, ch, T);
        CHECK(build_hankel(w, k).cols() == T - k + 1);
        CHECK(build_page(w, k).cols() == T / k);
    }
}

TEST_CASE("rank never decreases when samples are appended")
{
    Rng rng(15);
    const int order = 3;
    Trajectory base = random_traj(rng, 1, 8);
    int prev_rank = -1;
    for (int extra = 0; extra <= 10; extra += 2) {
        Eigen::MatrixXd data(1, 8 + extra);
        data.leftCols(8) = base.data();
        for (int t = 0; t < extra; ++t) data(0, 8 + t) = rng.uniform(-1.0, 1.0);
        ExcitationReport report = check_persistent_excitation(Trajectory(data), order);
        CHECK(report.computed_rank >= prev_rank);
        prev_rank = report.computed_rank;
    }
}

TEST_CASE("excitation on degenerate signals")
{
    ExcitationReport zero = check_persistent_excitation(Trajectory(2, 20), 3);
    CHECK_FALSE(zero.satisfied);
    CHECK(zero.computed_rank == 0);

    ExcitationReport constant = check_persistent_excitation(
        scalar_traj({1.5, 1.5, 1.5, 1.5, 1.5, 1.5}), 2);
    CHECK_FALSE(constant.satisfied);
    CHECK(constant.computed_rank == 1);
}

TEST_CASE("excitation for the demo-scale plant input length")
{
    // T = (m+1)(n+L) - 1 with m=2, n=4, L=30
    Rng rng(17);
    Trajectory u = random_traj(rng, 2, 101, 3.0);
    ExcitationReport report = check_persistent_excitation(u, 34);
    CHECK(report.required_rank == 68);
    CHECK(report.satisfied);
    CHECK(report.diagnostic.empty());
}

TEST_CASE("excitation reports a sizing shortfall instead of throwing")
{
    Rng rng(19);
    Trajectory u = random_traj(rng, 2, 40, 3.0);
    ExcitationReport report = check_persistent_excitation(u, 20);  // 21 cols < 40 required
    CHECK_FALSE(report.satisfied);
    CHECK(report.diagnostic != "");
    CHECK(report.computed_rank <= 21);
}

TEST_CASE("page excitation basics")
{
    ExcitationReport zero = check_page_excitation(Trajectory(1, 24), 4, 2);
    CHECK_FALSE(zero.satisfied);

    // order 1 reduces to the plain page matrix rank test
    Rng rng(21);
    Trajectory w = random_traj(rng, 1, 40);
    ExcitationReport one = check_page_excitation(w, 4, 1);
    BlockMatrix pg = build_page(w, 4);
    CHECK(one.computed_rank == numerical_rank(pg.entries));
    CHECK(one.required_rank == 4);
}

TEST_CASE("page excitation reached by a long random input")
{
    Rng rng(23);
    const int n = 2, L = 5;
    const int T = L * ((L + 1) * (n + 1) - 1) + L;
    Trajectory u = random_traj(rng, 1, T);
    ExcitationReport report = check_page_excitation(u, L, n + 1);
    CHECK(report.satisfied);
}

TEST_CASE("collective excitation")
{
    Rng rng(25);
    Trajectory w = random_traj(rng, 1, 30);
    ExcitationReport pe = check_persistent_excitation(w, 5);
    ExcitationReport col = check_collective_excitation({w}, 5);
    CHECK(pe.computed_rank == col.computed_rank);
    CHECK(pe.satisfied == col.satisfied);

    ExcitationReport dup = check_collective_excitation({w, w}, 5);
    CHECK(dup.computed_rank == col.computed_rank);

    // individually short records jointly exciting
    const int m = 1, L = 4, n = 2, q = 3;
    const int each = L + n + 3;  // >= L + n
    std::vector<Trajectory> ws;
    for (int i = 0; i < q; ++i) ws.push_back(random_traj(rng, m, each));
    REQUIRE(q * each >= (m + q) * (L + n) - q);
    ExcitationReport joint = check_collective_excitation(ws, L + n);
    CHECK(joint.satisfied);
}

TEST_CASE("membership residual certifies range membership")
{
    Rng rng(27);
    Trajectory w = random_traj(rng, 2, 30);
    BlockMatrix h = build_hankel(w, 5);

    CHECK(membership_residual(h, h.entries.col(3)) < 1e-10);

    Eigen::VectorXd g(h.cols());
    for (int i = 0; i < h.cols(); ++i) g(i) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd member = h.entries * g;
    CHECK(membership_residual(h, member) <= 1e-10 * (1.0 + member.norm()));

    Eigen::VectorXd wrong(h.rows() + 1);
    wrong.setZero();
    CHECK_THROWS_AS(membership_residual(h, wrong), std::invalid_argument);
}

TEST_CASE("noise-free simulated trajectories live in the exciting library")
{
    Rng rng(29);
    LtiSystem sys;
    sys.A.resize(2, 2);
    sys.A << 0.8, 0.1, 0.0, 0.7;
    sys.B.resize(2, 1);
    sys.B << 1.0, 0.4;
    sys.C.resize(1, 2);
    sys.C << 1.0, 0.5;
    sys.D = Eigen::MatrixXd::Zero(1, 1);

    const int L = 6, n = 2;
    const int T = 2 * (n + L) - 1 + 20;
    Trajectory u_d = random_traj(rng, 1, T);
    REQUIRE(check_persistent_excitation(u_d, n + L).satisfied);
    SimulationResult sim = simulate(sys, Eigen::VectorXd::Zero(2), u_d);
    BlockMatrix lib = stack_input_output(build_hankel(u_d, L), build_hankel(sim.output, L));

    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x0(2);
        x0 << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
        Trajectory u = random_traj(rng, 1, L);
        SimulationResult traj = simulate(sys, x0, u);
        Eigen::VectorXd stack(lib.rows());
        stack << u.stacked(), traj.output.stacked();
        CHECK(membership_residual(lib, stack) <= 1e-8 * (1.0 + stack.norm()));

        // reverse direction: any library combination replays through the plant
        Eigen::VectorXd g(lib.cols());
        for (int i = 0; i < lib.cols(); ++i) g(i) = rng.uniform(-0.5, 0.5);
        Eigen::VectorXd v = lib.entries * g;
        Trajectory u_mix = Trajectory::from_stacked(v.head(L), 1);
        Eigen::VectorXd y_mix = v.tail(L);
        // recover the implied initial state and replay
        StructuralFactors f = structural_factors(sys, L);
        Eigen::VectorXd x_implied =
            f.observability.colPivHouseholderQr().solve(y_mix - f.convolution * v.head(L));
        SimulationResult replay = simulate(sys, x_implied, u_mix);
        CHECK((replay.output.stacked() - y_mix).norm() <= 1e-8 * (1.0 + y_mix.norm()));
    }
}

TEST_CASE("trajectory csv roundtrip")
{
    Rng rng(31);
    Trajectory w = random_traj(rng, 3, 17);
    const std::string path = "traj_roundtrip_test.csv";
    w.store_csv(path);
    Trajectory back = Trajectory::load_csv(path);
    CHECK(back.channels() == 3);
    CHECK(back.length() == 17);
    CHECK(back.data() == w.data());
    std::filesystem::remove(path);
}

TEST_CASE("stacked trajectory helpers invert each other")
{
    Rng rng(33);
    Trajectory w = random_traj(rng, 2, 9);
    Trajectory back = Trajectory::from_stacked(w.stacked(), 2);
    CHECK(back.data() == w.data());
}
