#pragma once

#include <Eigen/Core>

#include "kdl/model.hpp"

namespace kdl {

/// All variational quantities at one (x, mu):
///   norm1_sq = ||x||_1^2 = sum_{k=1}^{n+1} (x_k - x_{k-1})^2
///   Q        = 1/2 int_0^{norm1_sq} K
///   psi_k    = int_0^{x_k} f_k
///   phi      = -sum_k int_0^{x_k} g_k
///   h        = Q - <psi, mu>
///   J        = h + phi
struct EnergyBreakdown {
    double norm1_sq = 0.0;
    double Q = 0.0;
    Eigen::VectorXd psi;
    double phi = 0.0;
    double h = 0.0;
    double J = 0.0;
};

struct Residual {
    Eigen::VectorXd components;
    double max_abs = 0.0;
};

double norm1_sq(const Eigen::VectorXd& x);
double inner1(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
Eigen::VectorXd laplacian(const Eigen::VectorXd& x);

double inner1(const StateVector& x, const StateVector& y);
Eigen::VectorXd laplacian(const StateVector& x);

/// |<x,y>_1 + sum_k lap(x)_k y_k|, an exact identity up to roundoff.
double summation_by_parts_check(const StateVector& x, const StateVector& y);

/// Distance induced by ||.||_1.
double distance1(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

EnergyBreakdown evaluate(const Problem& problem, const StateVector& x, const MuVector& mu);

/// Component k: -K(||x||_1^2) lap(x)_k - g_k(x_k) - mu_k f_k(x_k).
Eigen::VectorXd gradient(const Problem& problem, const StateVector& x, const MuVector& mu);

/// Left side minus right side of the difference system; numerically the
/// same vector as gradient(), kept separate for its "equation satisfied"
/// reading.
Residual residual(const Problem& problem, const StateVector& x, const MuVector& mu);

namespace energy {

/// J(x) with optional gradient into `grad`; the hot loop of every solver.
double value_and_gradient(const Problem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                          Eigen::VectorXd* grad);

/// h(x, mu) = Q(x) - <psi(x), mu> with optional gradient (no phi term).
double h_value_and_gradient(const Problem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                            Eigen::VectorXd* grad);

double Q(const Problem& problem, const Eigen::VectorXd& x);
Eigen::VectorXd psi(const Problem& problem, const Eigen::VectorXd& x);

}  // namespace energy
}  // namespace kdl
