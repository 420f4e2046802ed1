#pragma once

#include "deepc/lti_plant.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace deepc::suites {

// Randomized verification suites shared by the CLI check command and the
// acceptance harness. Trials fork per-index RNG streams from the master
// seed, so results are independent of execution order and thread count.

struct SuiteResult
{
    std::string name;
    int trials = 0;
    int failures = 0;
    double worst = 0.0;      // largest observed residual/ratio, suite-specific
    double tolerance = 0.0;  // threshold the residuals were held to
    std::string note;

    bool passed() const { return failures == 0 && note.empty(); }
};

/// Random controllable + observable plant with spectral radius < 1.
LtiSystem random_plant(std::uint64_t seed, int n, int m, int p);

/// Noise-free membership residuals against Hankel, Page and mosaic libraries
/// built under their respective excitation conditions.
SuiteResult membership_suite(std::uint64_t seed, int trials, double tolerance = 1e-8);

/// Rank of the noise-free stacked library: equals mL + n at sufficient depth,
/// never exceeds it, and the column surplus is at least m*n.
SuiteResult rank_bound_suite(std::uint64_t seed, int trials);

/// Data-matrix factorization identity on noise-free collected data.
SuiteResult factorization_suite(std::uint64_t seed, int plants, double tolerance = 1e-10);

/// Full/reduced solution equivalence on randomized instances with mixed
/// active and inactive constraints. Positive regularizers are a hypothesis:
/// non-positive values are reported as a violation, not run.
SuiteResult equivalence_suite(std::uint64_t seed, int instances, double tolerance, double lambda_u,
                           double lambda_y, double lambda_g);

/// KKT residuals of solver returns on randomized feasible programs.
SuiteResult kkt_suite(std::uint64_t seed, int instances, double tolerance = 1e-8);

/// Excitation reports across the data-length boundary T = (m+1)(n+L) - 1.
SuiteResult excitation_suite(std::uint64_t seed, int trials);

std::vector<SuiteResult> run_all(std::uint64_t seed, double lambda_u, double lambda_y,
                                 double lambda_g);

}  // namespace deepc::suites
