#pragma once

#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "kdl/bounds.hpp"
#include "kdl/model.hpp"

namespace kdl {

/// Tensor grid on the box [-radius, radius]^n with `points_per_dim` nodes
/// per axis, endpoints included (a single node sits at 0). Brute force
/// only: the total node count is capped at kMaxGridNodes.
struct Grid {
    int n = 1;
    double radius = 1.0;
    int points_per_dim = 1;

    static constexpr long kMaxGridNodes = 100'000'000;

    long size() const;
    double spacing() const;
    double coordinate(int i) const;
    /// Node index -> multi-index (last axis fastest).
    std::vector<int> multi_index(long node) const;
    Eigen::VectorXd point(long node) const;
};

struct GridMinResult {
    StateVector x;                    // first argmin in node order
    double J = 0.0;
    std::vector<StateVector> argmins; // every node within tie_rel_tol (1 + |J|) of the minimum
    long nodes = 0;
    double spacing = 0.0;
};

/// Smallest sampled J_mu on the grid (n <= 3, 1 <= points_per_dim <= 2001).
/// Work is split along the leading axis; the merge is in node order, so the
/// result does not depend on `jobs`.
GridMinResult grid_min(const Problem& problem, const MuVector& mu, double box_radius, int points_per_dim,
                       double tie_rel_tol = 1e-7, unsigned jobs = 1);

/// A grid cell [lo, hi] in which every gradient component changes sign
/// across the 2^n corners, so it can hold a critical point.
struct GridCell {
    std::vector<int> index;  // multi-index of the lower corner
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    bool contains(const Eigen::VectorXd& x, double slack = 0.0) const;
};

/// Sign-change cells of the gradient field. A lower bound on the number of
/// critical points only: tangential zeros can be missed.
std::vector<GridCell> grid_critical_points(const Problem& problem, const MuVector& mu, double box_radius,
                                           int points_per_dim, unsigned jobs = 1);

struct GridGapResult {
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    long x_nodes = 0;
    long mu_nodes = 0;
};

/// Brute-force alpha, beta and delta for n <= 2: alpha = min over the
/// x-grid of Q + sigma ||psi||, beta = max over a grid of the ball Y
/// (mu_points_per_dim odd so that mu = 0 is a node) of min over the x-grid
/// of Q - <psi, mu>.
GridGapResult grid_gap(const Problem& problem, const ConstantBundle& bundle, double box_radius,
                       int points_per_dim, int mu_points_per_dim = 21, unsigned jobs = 1);

/// CSV with header x1,...,xn,J and points_per_dim^n rows.
void write_landscape_csv(std::ostream& out, const Problem& problem, const MuVector& mu, double box_radius,
                         int points_per_dim);

/// Box half-width gamma R* (level 0) in the max norm; it contains every
/// x with ||x||_1 <= R*, hence all minimisers relevant to the gap.
double oracle_box_radius(const ConstantBundle& bundle, int n, double level = 0.0);

}  // namespace kdl
