#include "kdl/minimax.hpp"

#include <cmath>
#include <limits>

#include "kdl/energy.hpp"
#include "kdl/error.hpp"

namespace kdl {
namespace {

void accumulate(SolverStats* stats, const MultiStartResult& ms) {
    if (stats == nullptr) return;
    stats->local_runs += static_cast<int>(ms.runs.size());
    stats->converged_runs += ms.converged;
    stats->evaluations += ms.evaluations;
}

const LocalResult& best_run(const MultiStartResult& ms) {
    const LocalResult* best = nullptr;
    for (const auto& r : ms.runs) {
        if (!std::isfinite(r.value)) continue;
        if (best == nullptr || r.value < best->value) best = &r;
    }
    if (best == nullptr) throw ConvergenceError("multi-start: no run produced a finite value");
    return *best;
}

MuVector project_to_ball(const Eigen::VectorXd& mu, double radius) {
    const double norm = mu.norm();
    if (norm <= radius) return MuVector(mu);
    return MuVector(Eigen::VectorXd(mu * (radius / norm)));
}

}  // namespace

double sup_over_ball(const Eigen::VectorXd& psi, double Q, double sigma) {
    if (!(sigma >= 0.0)) throw PreconditionError("sup_over_ball: sigma must be non-negative");
    return Q + sigma * psi.norm();
}

std::pair<double, StateVector> compute_alpha(const Problem& problem, const ConstantBundle& bundle,
                                             const GapSettings& settings, SolverStats* stats) {
    const int n = problem.n();
    const double sigma = bundle.sigma;
    const ObjectiveFn objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        const double t = norm1_sq(x);
        const Eigen::VectorXd ps = energy::psi(problem, x);
        const double pn = ps.norm();
        const double value = 0.5 * problem.K_primitive(t) + sigma * pn;
        if (grad != nullptr) {
            const Eigen::VectorXd q = -problem.K(t) * laplacian(x);
            Eigen::VectorXd d(n);
            for (int k = 0; k < n; ++k) d[k] = problem.f(k, x[k]);
            if (pn >= 1e-12) {
                *grad = q + sigma * d.cwiseProduct(ps) / pn;
            } else {
                // Minimum-norm element of q + sigma * diag(d) * u, ||u|| <= 1.
                Eigen::VectorXd w(n);
                bool bounded = sigma > 0.0;
                for (int k = 0; k < n && bounded; ++k) {
                    if (d[k] != 0.0) {
                        w[k] = q[k] / (sigma * d[k]);
                    } else if (q[k] != 0.0) {
                        bounded = false;
                    } else {
                        w[k] = 0.0;
                    }
                }
                if (bounded && w.norm() <= 1.0) {
                    grad->setZero(n);
                } else if (bounded) {
                    *grad = q - sigma * d.cwiseProduct(w) / w.norm();
                } else {
                    *grad = q;
                }
            }
        }
        return value;
    };

    LocalSettings local = settings.local;
    local.newton_polish = false;
    const double radius = certified_radius(bundle, n, 0.0);
    const auto starts = make_starts(n, settings.starts, radius, settings.seed);
    const auto ms = multistart(objective, starts, local, settings.jobs);
    accumulate(stats, ms);
    if (ms.converged == 0) throw ConvergenceError("compute_alpha: no start converged");
    const auto& best = best_run(ms);
    return {best.value, StateVector(best.x)};
}

std::pair<double, StateVector> inner_infimum(const Problem& problem, const ConstantBundle& bundle,
                                             const MuVector& mu, const GapSettings& settings,
                                             SolverStats* stats) {
    const int n = problem.n();
    const Eigen::VectorXd m = mu.values();
    const ObjectiveFn objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        return energy::h_value_and_gradient(problem, x, m, grad);
    };
    const double radius = certified_radius(bundle, n, 0.0);
    const auto starts = make_starts(n, settings.starts, radius, settings.seed);
    const auto ms = multistart(objective, starts, settings.local, settings.jobs);
    accumulate(stats, ms);
    if (ms.converged == 0) throw ConvergenceError("inner_infimum: no start converged");
    const auto& best = best_run(ms);
    return {best.value, StateVector(best.x)};
}

std::pair<double, MuVector> compute_beta(const Problem& problem, const ConstantBundle& bundle,
                                         const GapSettings& settings, SolverStats* stats, int* iterations) {
    const int n = problem.n();
    const double sigma = bundle.sigma;
    MuVector mu = MuVector::zeros(n);
    double best = -std::numeric_limits<double>::infinity();
    MuVector best_mu = mu;
    int since_improvement = 0;
    int k = 1;
    for (; k <= settings.ascent_iterations; ++k) {
        const auto [value, x] = inner_infimum(problem, bundle, mu, settings, stats);
        if (value > best + settings.ascent_tol) {
            since_improvement = 0;
        } else {
            ++since_improvement;
        }
        if (value > best) {
            best = value;
            best_mu = mu;
        }
        if (since_improvement >= settings.ascent_patience) break;

        const Eigen::VectorXd super = -energy::psi(problem, x.values());
        const double sn = super.norm();
        if (sn < 1e-14) break;  // zero supergradient: mu is a maximiser
        const double step = sigma / std::sqrt(static_cast<double>(k));
        mu = project_to_ball(mu.values() + step * super / sn, sigma);
    }
    if (iterations != nullptr) *iterations = std::min(k, settings.ascent_iterations);
    return {best, best_mu};
}

GapReport compute_delta(const Problem& problem, const ConstantBundle& bundle, const GapSettings& settings) {
    GapReport report;
    auto [alpha, xa] = compute_alpha(problem, bundle, settings, &report.alpha_stats);
    auto [beta, mb] = compute_beta(problem, bundle, settings, &report.beta_stats, &report.ascent_iterations);
    report.alpha = alpha;
    report.beta = beta;
    report.alpha_minimizer = std::move(xa);
    report.beta_maximizer = std::move(mb);
    report.delta = (alpha - beta) / problem.n();
    report.weak_duality_ok = beta <= alpha + 1e-9;
    report.flagged = report.delta <= settings.flag_tol;
    report.caveats.push_back(
        "alpha and beta are multi-start estimates, not certified bounds; delta is heuristic");
    report.caveats.push_back("eta constants are fitted on samples up to t_max = " + std::to_string(bundle.t_max));
    if (report.flagged) {
        report.caveats.push_back(
            "delta is not positive at solver tolerance: the minimax hypotheses fail or the solver missed the optimum");
    }
    if (!report.weak_duality_ok) {
        report.caveats.push_back("weak duality violated (beta > alpha + 1e-9): inner solver failure");
    }
    return report;
}

}  // namespace kdl
