#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kdl/model.hpp"

namespace kdl {

/// Quantitative constants of the coercivity argument.
///
///   ||x||_2 <= gamma ||x||_1                      (embedding)
///   int_0^t K >= eta1 t - eta2      for t >= 0
///   |F_k(t)|  <= eta3 (t^2 + 1)     for all t, k
///   sigma < min{eta1 / (2 eta3 gamma^2), r}       (radius of the ball Y)
///
/// eta1, eta2 and eta3 are fitted on samples up to t_max only.
struct ConstantBundle {
    double gamma = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double eta3 = 0.0;
    double sigma = 0.0;
    double r = 0.0;
    double t_max = 0.0;
    std::optional<double> delta;

    /// Quadratic rate 1/2 eta1 - sigma gamma^2 eta3 of the coercivity bound
    /// for ||mu|| <= sigma; positive by construction of sigma.
    double coercivity_rate() const { return 0.5 * eta1 - sigma * gamma * gamma * eta3; }
};

/// 1 / sqrt(lambda_min) of tridiag(-1, 2, -1), lambda_min = 4 sin^2(pi / (2(n+1))).
double compute_gamma(int n);

struct Eta12 {
    double eta1 = 0.0;
    double eta2 = 0.0;
};

/// eta2 = max(0, sup_t (eta1 t - int_0^t K)) over samples of [0, t_max],
/// with the best sample refined by golden section. Throws PreconditionError
/// if the supremum is still growing at t_max (eta1 too large).
Eta12 fit_eta12(const Primitive& K_primitive, double eta1_target, double t_max, int samples = 10000);

/// eta3 = safety * max_{k, t} |F_k(t)| / (t^2 + 1) on samples of [-t_max, t_max],
/// floored at 1e-12.
double fit_eta3(std::span<const Primitive> F, double t_max, int samples = 10000, double safety = 1.01);

/// sigma = (1 - margin) min{eta1 / (2 eta3 gamma^2), r}; margin must lie in (0, 1).
double choose_sigma(double eta1, double eta3, double gamma, double r, double margin = 0.05);

/// 1/2 eta1 ||x||_1^2 - ||mu||_2 eta3 (gamma^2 ||x||_1^2 + n) - 1/2 eta2,
/// a lower bound for h(x, mu) whenever ||mu||_2 <= sigma.
double coercivity_bound(const ConstantBundle& bundle, int n, double norm1_sq, double mu_norm);
double coercivity_bound(const ConstantBundle& bundle, const StateVector& x, const MuVector& mu);

/// Radius R* in ||.||_1 beyond which the coercivity bound (worst case
/// ||mu|| = sigma) exceeds `level`. Every x with h(x, mu) <= level lies in
/// ||x||_1 <= R*. With level = sum of oscillations of the g_k this contains
/// all global minimisers of J_mu.
double certified_radius(const ConstantBundle& bundle, int n, double level = 0.0);

struct BoundsSettings {
    std::optional<double> eta1_target;  // default: half the sampled tail of int_0^t K / t
    double eta3_safety = 1.01;
    double sigma_margin = 0.05;
    double t_max = 1e3;
    int samples = 10000;
};

/// Fits every constant for `problem`. Requires condition (a) to be verified
/// on the sampled range (PreconditionError otherwise).
ConstantBundle build_bundle(const Problem& problem, const BoundsSettings& settings = {});

}  // namespace kdl
