#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace kdl {

/// Objective with optional gradient output: returns f(x) and, when `grad`
/// is non-null, writes the gradient (or a subgradient) into it.
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

/// Vector field, e.g. the gradient of an objective.
using VectorFieldFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& x)>;

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Exceptions are
/// rethrown from the lowest failing index. jobs == 0 means hardware concurrency.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

unsigned resolve_jobs(unsigned jobs);

struct LocalSettings {
    double grad_tol = 1e-10;  // infinity norm
    int max_iter = 100000;
    double armijo = 1e-4;
    double shrink = 0.5;
    int max_backtracks = 60;
    double max_step = 1.0;  // cap on the length of the first trial step
    bool newton_polish = true;
    double polish_tol = 1e-13;  // Newton polish target; tighter than grad_tol so basins are sharp
};

enum class StopReason { gradient, stalled, iteration_cap };

std::string_view to_string(StopReason r) noexcept;

struct LocalResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double grad_norm = 0.0;  // infinity norm
    int iterations = 0;
    int evaluations = 0;
    StopReason reason = StopReason::stalled;
    bool converged() const noexcept { return reason == StopReason::gradient; }
};

/// BFGS descent with Armijo backtracking; falls back to steepest descent
/// whenever the quasi-Newton direction is not a descent direction. Once the
/// gradient is small, an optional Newton polish on the gradient field
/// (finite-difference Jacobian) drives it towards polish_tol.
LocalResult minimize_bfgs(const ObjectiveFn& objective, Eigen::VectorXd x0, const LocalSettings& settings = {});

/// Central-difference Jacobian of `field` at `x`.
Eigen::MatrixXd fd_jacobian(const VectorFieldFn& field, const Eigen::VectorXd& x);

struct NewtonResult {
    Eigen::VectorXd x;
    double residual = 0.0;  // infinity norm of field(x)
    int iterations = 0;
    bool converged = false;
};

/// Damped Newton iteration on field(x) = 0 with a finite-difference
/// Jacobian and backtracking on ||field||_2. Stops at `tol` (infinity norm)
/// or when no step reduces the residual.
NewtonResult newton_solve(const VectorFieldFn& field, Eigen::VectorXd x0, double tol, int max_iter = 50);

/// A cluster of local minimiser results.
struct Basin {
    Eigen::VectorXd x;  // lowest member
    double value = 0.0;
    double grad_norm = 0.0;
    int hits = 0;
};

/// Groups converged results whose ||.||_1 distance to a basin representative
/// is <= radius. Basins are returned sorted by value (ties: lexicographic x),
/// so the order is independent of the order of `results`.
std::vector<Basin> cluster_basins(const std::vector<LocalResult>& results, double radius,
                                  double max_grad_norm);

/// Start points for multi-start runs in R^n: the origin, +- the first
/// Dirichlet-Laplacian eigenvector scaled to ||.||_1 = radius / 2, then
/// Gaussian draws scaled so that a typical ||x||_1 is radius / 2.
std::vector<Eigen::VectorXd> make_starts(int n, int count, double radius, std::uint64_t seed);

struct MultiStartResult {
    std::vector<LocalResult> runs;
    std::vector<Basin> basins;
    int converged = 0;
    long evaluations = 0;
};

MultiStartResult multistart(const ObjectiveFn& objective, const std::vector<Eigen::VectorXd>& starts,
                            const LocalSettings& settings, unsigned jobs, double basin_radius = 1e-6,
                            double basin_grad_tol = 1e-6);

}  // namespace kdl
