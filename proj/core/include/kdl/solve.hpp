#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kdl/bounds.hpp"
#include "kdl/minimax.hpp"
#include "kdl/model.hpp"
#include "kdl/optimize.hpp"

namespace kdl {

enum class PointKind { global_min, local_min, saddle_like };

std::string_view to_string(PointKind k) noexcept;

struct CriticalPoint {
    StateVector x;
    double J = 0.0;
    double grad_norm = 0.0;  // infinity norm of the residual
    PointKind kind = PointKind::local_min;
    int basin_id = -1;
};

struct SolveSettings {
    int starts = 64;
    std::uint64_t seed = 0;
    LocalSettings local;
    unsigned jobs = 1;

    // mu search
    int sweep_points = 512;
    int refine_points = 16;
    int max_rounds = 200;
    double tie_rel_tol = 1e-7;     // two minima tie if |J1 - J2| <= tie_rel_tol (1 + |J|)
    double basin_radius = 1e-6;    // ||.||_1 clustering radius
    double oscillation_safety = 0.99;

    // certification
    double cert_tol = 1e-8;        // residual bound; distinctness needs 10x this
    double quad_tighten = 1e-2;    // factor applied to the quadrature tolerance when certifying

    // third critical point
    int path_nodes = 33;
    int string_iterations = 2000;

    // sampling of the perturbation primitives
    double t_max = 1e3;
    int samples = 10000;
};

struct OscillationReport {
    std::vector<double> per_k;
    double max = 0.0;
    double budget = 0.0;  // oscillation_safety * delta
};

/// Sampled sup - inf of t -> int_0^t g(s) ds over [-t_max, t_max], with the
/// extreme samples refined by golden section.
double oscillation(const Primitive& G, double t_max = 1e3, int samples = 10000);
double oscillation(const ExprFn& g, double t_max = 1e3, int samples = 10000);

OscillationReport oscillation_report(const Problem& problem, double delta, const SolveSettings& settings);

struct TieSearchResult {
    MuVector mu;
    CriticalPoint m1;  // lower of the two
    CriticalPoint m2;
    double tie_score = 0.0;   // J(m2) - J(m1)
    double tie_tolerance = 0.0;
    int rounds = 0;
    int mu_evaluations = 0;
    std::vector<double> score_history;  // best tie score after the sweep and each round
};

/// Searches the ball Y for mu such that J_mu has two global minima.
///
/// A low-discrepancy sweep of Y is ranked by the tie score (second-best
/// basin minus best) for points with two basins, and by min J_mu otherwise
/// (its maximiser over Y carries a tie). The best point is then refined
/// by shrinking neighbourhoods plus an envelope-Newton step on the tie
/// d(mu) = J(b2) - J(b1), whose mu-gradient is psi(b1) - psi(b2).
///
/// Requires max_k osc(g_k) < oscillation_safety * delta (PreconditionError).
/// Throws BudgetExhausted with the best near-tie when no tie is found.
TieSearchResult find_mu_tilde(const Problem& problem, const ConstantBundle& bundle, const GapReport& gap,
                              const SolveSettings& settings = {});

/// A third critical point of J_mu between two distinct minima: a climbing
/// string (mountain pass) from m1 to m2 finished by Newton on the gradient,
/// with deflated Newton from multiple starts as a fallback.
CriticalPoint third_critical_point(const Problem& problem, const MuVector& mu, const StateVector& m1,
                                   const StateVector& m2, const SolveSettings& settings = {},
                                   double box_radius = 0.0);

struct Certificate {
    ProblemSpec problem;
    ConstantBundle constants;
    GapReport gap;
    OscillationReport oscillation;
    MuVector mu_tilde;
    std::vector<CriticalPoint> solutions;
    double residual_max = 0.0;
    double tie_score = 0.0;
    double tie_tolerance = 0.0;
    double certified_radius = 0.0;
    double cert_tol = 1e-8;
    int search_rounds = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::string> caveats;
};

/// Re-evaluates every point at a tightened quadrature tolerance and checks
/// all certificate invariants; throws CertificationError listing every
/// violated invariant.
Certificate certify(const Problem& problem, const ConstantBundle& bundle, const GapReport& gap,
                    const MuVector& mu, std::vector<CriticalPoint> points, const SolveSettings& settings = {});

/// Oscillation check, mu search, third critical point and certification.
Certificate solve(const Problem& problem, const ConstantBundle& bundle, const GapReport& gap,
                  const SolveSettings& settings = {});

}  // namespace kdl
