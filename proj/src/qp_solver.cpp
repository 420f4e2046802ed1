#include "deepc/qp_solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace deepc {

std::string to_string(QpStatus s)
{
    switch (s) {
        case QpStatus::optimal: return "optimal";
        case QpStatus::max_iter: return "max_iter";
        case QpStatus::numerical_error: return "numerical_error";
    }
    return "numerical_error";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_spec(const QpSpec& spec)
{
    const Eigen::Index d = spec.f.size();
    if (spec.H.rows() != d || spec.H.cols() != d || d < 1) {
        throw std::invalid_argument("qp: H must be d x d matching f");
    }
    const double scale = std::max(1.0, spec.H.cwiseAbs().maxCoeff());
    if ((spec.H - spec.H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw std::invalid_argument("qp: H is not symmetric");
    }
    if (spec.A.rows() != spec.b.size() || (spec.A.rows() > 0 && spec.A.cols() != d)) {
        throw std::invalid_argument("qp: inequality system shape mismatch");
    }
}

QpResiduals residuals_at(const QpSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& mu)
{
    QpResiduals res;
    Eigen::VectorXd grad = spec.H * x + spec.f;
    if (spec.A.rows() > 0) {
        grad.noalias() += spec.A.transpose() * mu;
        Eigen::VectorXd slack = spec.A * x - spec.b;
        res.complementarity = std::abs(mu.dot(slack));
        res.infeasibility = slack.cwiseMax(0.0).norm();
    }
    res.stationarity = grad.norm();
    return res;
}

double objective_at(const QpSpec& spec, const Eigen::VectorXd& x)
{
    return 0.5 * x.dot(spec.H * x) + spec.f.dot(x);
}

struct Clock
{
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

QpSolution finalize(const QpSpec& spec, Eigen::VectorXd x, Eigen::VectorXd mu, QpStatus status,
                    int iterations, const Clock& clock, std::vector<double> merit,
                    const QpSettings& settings)
{
    QpSolution sol;
    sol.mu = mu.cwiseMax(0.0);  // clamp rounding-level negatives
    sol.residuals = residuals_at(spec, x, sol.mu);
    sol.objective = objective_at(spec, x);
    sol.x = std::move(x);
    sol.iterations = iterations;
    sol.wall_time_ms = clock.ms();
    sol.merit_history = std::move(merit);

    if (status == QpStatus::optimal) {
        const double stat_scale = 1.0 + spec.f.cwiseAbs().maxCoeff();
        double max_violation = 0.0;
        if (spec.b.size() > 0) {
            // per-row check matching the termination criterion
            const Eigen::VectorXd slack = spec.A * sol.x - spec.b;
            for (Eigen::Index i = 0; i < slack.size(); ++i) {
                const double gate = 1.0 + std::abs(spec.b(i));
                max_violation = std::max(max_violation, slack(i) / gate);
            }
        }
        const double feas_scale = 1.0 + (spec.b.size() ? spec.b.cwiseAbs().maxCoeff() : 0.0);
        const bool ok = sol.residuals.stationarity <= settings.tolerance * stat_scale &&
                        max_violation <= settings.tolerance &&
                        sol.residuals.complementarity <=
                            settings.tolerance * stat_scale * feas_scale;
        if (!ok) status = QpStatus::numerical_error;
    }
    sol.status = status;
    return sol;
}

}  // namespace

QpSolution solve_unconstrained(const QpSpec& spec, const QpSettings& settings)
{
    validate_spec(spec);
    Clock clock;
    Eigen::LLT<Eigen::MatrixXd> llt(spec.H);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(spec.A.rows());
    if (llt.info() != Eigen::Success) {
        return finalize(spec, Eigen::VectorXd::Zero(spec.dim()), mu, QpStatus::numerical_error, 0,
                        clock, {}, settings);
    }
    Eigen::VectorXd x = llt.solve(-spec.f);
    x += llt.solve(-spec.f - spec.H * x);
    const double resid = (spec.H * x + spec.f).norm();
    const QpStatus status = resid <= 1e-10 * std::max(1.0, spec.f.norm())
                                ? QpStatus::optimal
                                : QpStatus::numerical_error;
    QpSolution sol;
    sol.x = std::move(x);
    sol.mu = std::move(mu);
    sol.objective = objective_at(spec, sol.x);
    sol.status = status;
    sol.residuals = residuals_at(spec, sol.x, sol.mu);
    sol.iterations = 1;
    sol.wall_time_ms = clock.ms();
    return sol;
}

// Dual active-set iteration: starting from the unconstrained minimizer the
// method keeps a stationary, dual-feasible pair (x, mu) and works violated
// constraints in one at a time, taking the largest step that preserves
// mu >= 0 (partial steps drop a blocking constraint). The dual objective
// rises monotonically, which gives finite termination.
QpSolution solve(const QpSpec& spec, const QpSettings& settings)
{
    validate_spec(spec);
    Clock clock;
    const Eigen::Index d = spec.dim();
    const Eigen::Index n_con = spec.A.rows();
    std::vector<double> merit;

    Eigen::LLT<Eigen::MatrixXd> llt(spec.H);
    if (llt.info() != Eigen::Success) {
        return finalize(spec, Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(n_con),
                        QpStatus::numerical_error, 0, clock, std::move(merit), settings);
    }
    auto refined_solve = [&](const Eigen::VectorXd& rhs) {
        Eigen::VectorXd v = llt.solve(rhs);
        v += llt.solve(rhs - spec.H * v);
        return v;
    };

    Eigen::VectorXd x = refined_solve(-spec.f);
    if (n_con == 0) {
        merit.push_back(-objective_at(spec, x));
        return finalize(spec, std::move(x), Eigen::VectorXd::Zero(0), QpStatus::optimal, 1, clock,
                        std::move(merit), settings);
    }

    std::vector<int> active;
    Eigen::MatrixXd HiAt(d, 0);     // H^{-1} A_W^T
    Eigen::VectorXd mu_active(0);

    auto append_active = [&](int idx, const Eigen::VectorXd& hi_col, double mu_value) {
        HiAt.conservativeResize(Eigen::NoChange, HiAt.cols() + 1);
        HiAt.col(HiAt.cols() - 1) = hi_col;
        mu_active.conservativeResize(mu_active.size() + 1);
        mu_active(mu_active.size() - 1) = mu_value;
        active.push_back(idx);
    };
    auto drop_active = [&](int pos) {
        const Eigen::Index last = HiAt.cols() - 1;
        if (pos != last) {
            HiAt.col(pos) = HiAt.col(last);
            mu_active(pos) = mu_active(last);
            active[static_cast<size_t>(pos)] = active.back();
        }
        HiAt.conservativeResize(Eigen::NoChange, last);
        mu_active.conservativeResize(last);
        active.pop_back();
    };
    auto rows_of_active = [&]() {
        Eigen::MatrixXd Aw(active.size(), d);
        for (size_t i = 0; i < active.size(); ++i) Aw.row(static_cast<Eigen::Index>(i)) = spec.A.row(active[i]);
        return Aw;
    };
    auto mu_full = [&]() {
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(n_con);
        for (size_t i = 0; i < active.size(); ++i) mu(active[i]) = mu_active(static_cast<Eigen::Index>(i));
        return mu;
    };
    auto dual_objective = [&](double mu_p, int p) {
        double q = objective_at(spec, x);
        for (size_t i = 0; i < active.size(); ++i) {
            q += mu_active(static_cast<Eigen::Index>(i)) *
                 (spec.A.row(active[i]).dot(x) - spec.b(active[i]));
        }
        if (p >= 0) q += mu_p * (spec.A.row(p).dot(x) - spec.b(p));
        return q;
    };

    // Warm working set: constraints active at the hint, negatives dropped
    // until the seeded multipliers are dual feasible.
    if (spec.warm_x && spec.warm_x->size() == d) {
        Eigen::VectorXd slack = spec.A * (*spec.warm_x) - spec.b;
        for (int i = 0; i < n_con && static_cast<Eigen::Index>(active.size()) < d; ++i) {
            if (slack(i) >= -settings.tolerance * (1.0 + std::abs(spec.b(i)))) {
                append_active(i, refined_solve(spec.A.row(i).transpose()), 0.0);
            }
        }
        bool seeded = false;
        while (!active.empty()) {
            Eigen::MatrixXd Aw = rows_of_active();
            Eigen::MatrixXd M = Aw * HiAt;
            Eigen::VectorXd rhs = -(HiAt.transpose() * spec.f);
            for (size_t i = 0; i < active.size(); ++i) rhs(static_cast<Eigen::Index>(i)) -= spec.b(active[i]);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
            Eigen::VectorXd mu_try = ldlt.solve(rhs);
            if (ldlt.info() != Eigen::Success ||
                (M * mu_try - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) {
                break;  // dependent seed set, fall back to empty start
            }
            Eigen::Index worst;
            if (mu_try.size() > 0 && mu_try.minCoeff(&worst) < 0.0) {
                mu_active = mu_try;
                drop_active(static_cast<int>(worst));
                continue;
            }
            mu_active = mu_try;
            seeded = true;
            break;
        }
        if (!seeded) {
            active.clear();
            HiAt.resize(d, 0);
            mu_active.resize(0);
        }
        Eigen::VectorXd shifted = spec.f;
        if (!active.empty()) shifted += rows_of_active().transpose() * mu_active;
        x = -refined_solve(shifted);
    }

    merit.push_back(-dual_objective(0.0, -1));

    // one fresh solve on the final active set strips accumulated roundoff
    auto polish = [&]() {
        Eigen::VectorXd x_new;
        Eigen::VectorXd mu_new;
        if (active.empty()) {
            x_new = refined_solve(-spec.f);
        } else {
            Eigen::MatrixXd Aw = rows_of_active();
            Eigen::MatrixXd M = Aw * HiAt;
            Eigen::VectorXd rhs = -(HiAt.transpose() * spec.f);
            for (size_t i = 0; i < active.size(); ++i) {
                rhs(static_cast<Eigen::Index>(i)) -= spec.b(active[i]);
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
            mu_new = ldlt.solve(rhs);
            if (ldlt.info() != Eigen::Success || (mu_new.array() < 0.0).any()) return;
            x_new = -refined_solve(spec.f + Aw.transpose() * mu_new);
        }
        auto max_violation = [&](const Eigen::VectorXd& v) {
            double worst = 0.0;
            Eigen::VectorXd s = spec.A * v - spec.b;
            for (Eigen::Index i = 0; i < s.size(); ++i) {
                worst = std::max(worst, s(i) / (1.0 + std::abs(spec.b(i))));
            }
            return worst;
        };
        if (max_violation(x_new) <= std::max(max_violation(x), settings.tolerance)) {
            x = std::move(x_new);
            if (!active.empty()) mu_active = std::move(mu_new);
        }
    };

    int iterations = 0;
    while (iterations < settings.max_iterations) {
        // most violated inactive constraint
        Eigen::VectorXd slack = spec.A * x - spec.b;
        for (int idx : active) slack(idx) = -kInf;
        Eigen::Index p;
        const double violation = slack.maxCoeff(&p);
        if (violation <= settings.tolerance * (1.0 + std::abs(spec.b(p)))) {
            polish();
            return finalize(spec, std::move(x), mu_full(), QpStatus::optimal, iterations, clock,
                            std::move(merit), settings);
        }

        const Eigen::VectorXd a_p = spec.A.row(p).transpose();
        const Eigen::VectorXd hp = refined_solve(a_p);
        double mu_p = 0.0;

        // work constraint p in, dropping blockers as their multipliers hit zero
        while (iterations < settings.max_iterations) {
            ++iterations;
            Eigen::VectorXd r;
            Eigen::VectorXd z;
            if (active.empty()) {
                z = hp;
            } else {
                Eigen::MatrixXd Aw = rows_of_active();
                Eigen::MatrixXd M = Aw * HiAt;
                Eigen::VectorXd rhs = Aw * hp;
                Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
                r = ldlt.solve(rhs);
                if (ldlt.info() != Eigen::Success ||
                    (M * r - rhs).norm() > 1e-6 * (1.0 + rhs.norm())) {
                    return finalize(spec, std::move(x), mu_full(), QpStatus::numerical_error,
                                    iterations, clock, std::move(merit), settings);
                }
                z = hp - HiAt * r;
            }
            const double kappa = a_p.dot(z);  // curvature along the new normal

            const double s_p = a_p.dot(x) - spec.b(p);
            const double t_full = kappa > 0.0 ? s_p / kappa : kInf;

            double t_partial = kInf;
            int blocker = -1;
            for (Eigen::Index j = 0; j < mu_active.size(); ++j) {
                if (r.size() > 0 && r(j) > 1e-14) {
                    const double cand = mu_active(j) / r(j);
                    if (cand < t_partial) {
                        t_partial = cand;
                        blocker = static_cast<int>(j);
                    }
                }
            }

            const double t = std::min(t_full, t_partial);
            if (!std::isfinite(t)) {
                // no finite step can satisfy the constraint: infeasible system
                return finalize(spec, std::move(x), mu_full(), QpStatus::numerical_error,
                                iterations, clock, std::move(merit), settings);
            }

            x.noalias() -= t * z;
            if (r.size() > 0) mu_active.noalias() -= t * r;
            mu_p += t;
            merit.push_back(-dual_objective(mu_p, static_cast<int>(p)));

            if (t_full <= t_partial) {
                append_active(static_cast<int>(p), hp, mu_p);
                break;
            }
            drop_active(blocker);
        }
    }

    return finalize(spec, std::move(x), mu_full(), QpStatus::max_iter, iterations, clock,
                    std::move(merit), settings);
}

}  // namespace deepc
