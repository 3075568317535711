#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kdl/bounds.hpp"
#include "kdl/model.hpp"
#include "kdl/optimize.hpp"

namespace kdl {

struct SolverStats {
    int local_runs = 0;
    int converged_runs = 0;
    long evaluations = 0;
};

/// The two minimax values of h(x, mu) = Q(x) - <psi(x), mu> over X x Y and
/// their normalised gap delta = (alpha - beta) / n.
///
/// Both values come from heuristic multi-start searches, so alpha and beta
/// are estimates rather than certified bounds.
struct GapReport {
    double alpha = 0.0;  // inf_x sup_{mu in Y} h
    double beta = 0.0;   // sup_{mu in Y} inf_x h
    double delta = 0.0;
    StateVector alpha_minimizer;
    MuVector beta_maximizer;
    bool flagged = false;          // delta <= flag tolerance
    bool weak_duality_ok = true;   // beta <= alpha + 1e-9
    int ascent_iterations = 0;
    SolverStats alpha_stats;
    SolverStats beta_stats;
    std::vector<std::string> caveats;
};

struct GapSettings {
    int starts = 64;
    std::uint64_t seed = 0;
    LocalSettings local;
    int ascent_iterations = 200;
    double ascent_tol = 1e-8;
    int ascent_patience = 20;  // iterations without improvement > ascent_tol before stopping
    double flag_tol = 1e-8;
    unsigned jobs = 1;
};

/// sup over ||mu||_2 <= sigma of Q - <psi, mu>, i.e. Q + sigma ||psi||_2.
double sup_over_ball(const Eigen::VectorXd& psi, double Q, double sigma);

/// Multi-start minimisation of x -> Q(x) + sigma ||psi(x)||_2 from starts
/// inside ||x||_1 <= R*. Non-smooth where psi = 0; there a minimum-norm
/// subgradient is used.
std::pair<double, StateVector> compute_alpha(const Problem& problem, const ConstantBundle& bundle,
                                             const GapSettings& settings, SolverStats* stats = nullptr);

/// g(mu) = inf_x h(x, mu) by multi-start minimisation; also returns the best minimiser.
std::pair<double, StateVector> inner_infimum(const Problem& problem, const ConstantBundle& bundle,
                                             const MuVector& mu, const GapSettings& settings,
                                             SolverStats* stats = nullptr);

/// Projected supergradient ascent of the concave g over the ball Y, starting
/// at mu = 0 with steps sigma / sqrt(k). A supergradient at mu is
/// -psi(x_mu) for an inner minimiser x_mu.
std::pair<double, MuVector> compute_beta(const Problem& problem, const ConstantBundle& bundle,
                                         const GapSettings& settings, SolverStats* stats = nullptr,
                                         int* iterations = nullptr);

GapReport compute_delta(const Problem& problem, const ConstantBundle& bundle, const GapSettings& settings = {});

}  // namespace kdl
