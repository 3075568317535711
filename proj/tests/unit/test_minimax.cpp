#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kdl/bounds.hpp"
#include "kdl/minimax.hpp"

namespace {

kdl::ProblemSpec zero_f_spec(int n) {
    auto spec = kdl::canonical_spec(n);
    for (auto& f : spec.f) f = kdl::ExprFn::parse("0");
    for (auto& F : spec.f_primitive) F = kdl::ExprFn::parse("0");
    return spec;
}

}  // namespace

TEST(Minimax, SupOverBall) {
    Eigen::VectorXd psi(1);
    psi << std::atan(1.0);
    EXPECT_NEAR(kdl::sup_over_ball(psi, 1.0, 1.0), 1.0 + std::numbers::pi / 4, 1e-15);
    EXPECT_EQ(kdl::sup_over_ball(Eigen::Vector2d(3.0, 4.0), -1.0, 0.5), 1.5);
    EXPECT_EQ(kdl::sup_over_ball(Eigen::Vector2d(3.0, 4.0), 2.0, 0.0), 2.0);
}

TEST(Minimax, ZeroNonlinearityHasNoGap) {
    const kdl::Problem p(zero_f_spec(1));
    const auto bundle = kdl::build_bundle(p);
    kdl::GapSettings settings;
    settings.starts = 16;
    const auto report = kdl::compute_delta(p, bundle, settings);
    EXPECT_NEAR(report.alpha, -0.125, 1e-9);
    EXPECT_NEAR(report.beta, -0.125, 1e-9);
    EXPECT_TRUE(report.flagged);
    EXPECT_TRUE(report.weak_duality_ok);
}

TEST(Minimax, CanonicalGap) {
    for (int n : {1, 2}) {
        const kdl::Problem p(kdl::canonical_spec(n, 2.0, -1.0, 0.001));
        const auto bundle = kdl::build_bundle(p);
        kdl::GapSettings settings;
        settings.starts = 16;
        const auto report = kdl::compute_delta(p, bundle, settings);
        EXPECT_NEAR(report.alpha, 0.0, 1e-9) << n;
        EXPECT_NEAR(report.beta, -0.125, 1e-7) << n;
        EXPECT_NEAR(report.delta, 0.125 / n, 1e-7) << n;
        EXPECT_GE(report.beta, -0.125 - 1e-9);
        EXPECT_LE(report.beta, report.alpha + 1e-9);
        EXPECT_FALSE(report.flagged);
        EXPECT_LE(report.beta_maximizer.norm2(), bundle.sigma * (1 + 1e-12));
    }
}

TEST(Minimax, InnerInfimumAtZero) {
    const kdl::Problem p(kdl::canonical_spec(2));
    const auto bundle = kdl::build_bundle(p);
    kdl::GapSettings settings;
    settings.starts = 8;
    const auto [value, x] = kdl::inner_infimum(p, bundle, kdl::MuVector::zeros(2), settings);
    EXPECT_NEAR(value, -0.125, 1e-10);
}
