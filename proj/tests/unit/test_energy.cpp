#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "kdl/energy.hpp"
#include "kdl/error.hpp"
#include "support/reference.hpp"

using kdl::MuVector;
using kdl::StateVector;

TEST(DiscreteNorm, HandValues) {
    EXPECT_EQ(kdl::inner1(StateVector{3.0}, StateVector{5.0}), 30.0);  // 2cd
    EXPECT_EQ(kdl::inner1(StateVector{1.0, 1.0}, StateVector{1.0, 1.0}), 2.0);
    EXPECT_EQ(kdl::norm1_sq(Eigen::Vector3d(1.0, 2.0, 1.0)), 1.0 + 1.0 + 1.0 + 1.0);
    EXPECT_NEAR(kdl::distance1(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 0.0)), std::sqrt(2.0), 1e-15);
    EXPECT_THROW(kdl::inner1(StateVector{1.0}, StateVector{1.0, 2.0}), kdl::PreconditionError);
}

TEST(DiscreteNorm, Laplacian) {
    const Eigen::VectorXd lap = kdl::laplacian(StateVector{1.0, 2.0, 1.0});
    EXPECT_EQ(lap, Eigen::Vector3d(0.0, -2.0, 0.0));
    EXPECT_EQ(kdl::laplacian(StateVector{4.0})[0], -8.0);
}

TEST(DiscreteNorm, SummationByParts) {
    std::mt19937_64 rng(7);
    for (int n : {1, 2, 5, 9}) {
        for (int trial = 0; trial < 50; ++trial) {
            const StateVector x(kdl::ref::random_vector(rng, n, 3.0));
            const StateVector y(kdl::ref::random_vector(rng, n, 3.0));
            EXPECT_LE(kdl::summation_by_parts_check(x, y), 1e-12 * (1.0 + x.norm2() * y.norm2()));
        }
    }
}

TEST(DiscreteNorm, MatchesReference) {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 6; ++n) {
        const Eigen::VectorXd x = kdl::ref::random_vector(rng, n, 2.0);
        EXPECT_NEAR(kdl::norm1_sq(x), kdl::ref::norm1_sq(x), 1e-13 * (1 + kdl::ref::norm1_sq(x)));
    }
}

TEST(Energy, HandEvaluations) {
    const kdl::Problem p(kdl::canonical_spec(1));
    const auto e = kdl::evaluate(p, StateVector{1.0}, MuVector{0.0});
    EXPECT_EQ(e.norm1_sq, 2.0);
    EXPECT_NEAR(e.Q, 1.0, 1e-15);
    EXPECT_NEAR(e.J, 1.0, 1e-15);
    EXPECT_EQ(e.phi, 0.0);

    const double sigma = 0.3;
    const auto m = kdl::evaluate(p, StateVector{1.0}, MuVector{sigma});
    EXPECT_NEAR(m.J, 1.0 - sigma * std::numbers::pi / 4, 1e-15);
    EXPECT_NEAR(m.h, m.J, 1e-15);
}

TEST(Energy, HandGradients) {
    const kdl::Problem p(kdl::canonical_spec(1));
    // -K(2) * lap(1) = -3 * (-2)
    EXPECT_NEAR(kdl::gradient(p, StateVector{1.0}, MuVector{0.0})[0], 6.0, 1e-14);
    EXPECT_NEAR(kdl::gradient(p, StateVector{0.0}, MuVector{0.25})[0], -0.25, 1e-15);
    const auto res = kdl::residual(p, StateVector{0.5}, MuVector{0.0});
    EXPECT_NEAR(res.max_abs, 0.0, 1e-15);  // minimiser of the unperturbed n = 1 problem
}

TEST(Energy, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(3);
    for (int n : {1, 3, 6}) {
        const kdl::Problem p(kdl::canonical_spec(n, 2.0, -1.0, 0.05));
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::VectorXd x = kdl::ref::random_vector(rng, n, 1.5);
            const Eigen::VectorXd mu = kdl::ref::random_vector(rng, n, 0.5);
            Eigen::VectorXd g;
            kdl::energy::value_and_gradient(p, x, mu, &g);
            for (int k = 0; k < n; ++k) {
                const double h = 1e-5 * (1.0 + std::abs(x[k]));
                Eigen::VectorXd xp = x;
                Eigen::VectorXd xm = x;
                xp[k] += h;
                xm[k] -= h;
                const double fd = (kdl::ref::canonical_J(xp, mu, 2.0, -1.0, 0.05) -
                                   kdl::ref::canonical_J(xm, mu, 2.0, -1.0, 0.05)) /
                                  (2 * h);
                EXPECT_NEAR(g[k], fd, 1e-6 * (1.0 + std::abs(fd))) << "n=" << n << " k=" << k;
            }
        }
    }
}

TEST(Energy, MatchesClosedFormReference) {
    std::mt19937_64 rng(5);
    for (int n : {1, 2, 4}) {
        auto spec = kdl::canonical_spec(n, 2.0, -1.0, 0.02);
        spec.K_primitive.reset();
        spec.f_primitive.clear();
        spec.g_primitive.clear();
        const kdl::Problem quad(spec);
        const kdl::Problem closed(kdl::canonical_spec(n, 2.0, -1.0, 0.02));
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::VectorXd x = kdl::ref::random_vector(rng, n, 3.0);
            const Eigen::VectorXd mu = kdl::ref::random_vector(rng, n, 0.4);
            const double ref = kdl::ref::canonical_J(x, mu, 2.0, -1.0, 0.02);
            const double tol = 1e-8 * (1.0 + std::abs(ref));
            EXPECT_NEAR(kdl::evaluate(closed, StateVector(x), MuVector(mu)).J, ref, 1e-12 * (1.0 + std::abs(ref)));
            EXPECT_NEAR(kdl::evaluate(quad, StateVector(x), MuVector(mu)).J, ref, tol);
        }
    }
}

TEST(Energy, Symmetries) {
    const kdl::Problem p(kdl::canonical_spec(3));
    const StateVector x{0.4, -1.1, 0.7};
    const MuVector mu{0.1, 0.2, -0.05};
    const auto plus = kdl::evaluate(p, x, mu);
    const auto minus = kdl::evaluate(p, -x, mu);
    EXPECT_EQ(plus.Q, minus.Q);
    EXPECT_NEAR((plus.psi + minus.psi).norm(), 0.0, 1e-15);
    EXPECT_NEAR(kdl::evaluate(p, -x, -mu).h, plus.h, 1e-15);
}

TEST(Energy, RejectsDimensionMismatch) {
    const kdl::Problem p(kdl::canonical_spec(2));
    EXPECT_THROW(kdl::evaluate(p, StateVector{1.0}, MuVector{0.0}), kdl::PreconditionError);
}
