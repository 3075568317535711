#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "kdl/bounds.hpp"
#include "kdl/energy.hpp"
#include "kdl/error.hpp"
#include "kdl/minimax.hpp"
#include "kdl/solve.hpp"

namespace {

struct Setup {
    kdl::Problem problem;
    kdl::ConstantBundle bundle;
    kdl::GapReport gap;
};

Setup setup(int n, double eps) {
    kdl::Problem p(kdl::canonical_spec(n, 2.0, -1.0, eps));
    auto bundle = kdl::build_bundle(p);
    kdl::GapSettings gs;
    gs.starts = 16;
    auto gap = kdl::compute_delta(p, bundle, gs);
    return {std::move(p), bundle, gap};
}

kdl::SolveSettings small_settings() {
    kdl::SolveSettings s;
    s.starts = 24;
    s.sweep_points = 64;
    return s;
}

}  // namespace

TEST(Oscillation, KnownValues) {
    EXPECT_NEAR(kdl::oscillation(kdl::ExprFn::parse("cos(t)")), 2.0, 1e-8);
    EXPECT_NEAR(kdl::oscillation(kdl::ExprFn::parse("0.01*cos(t)")), 0.02, 1e-10);
    EXPECT_EQ(kdl::oscillation(kdl::ExprFn::parse("0")), 0.0);
}

TEST(Oscillation, ReportBudget) {
    const kdl::Problem p(kdl::canonical_spec(2, 2.0, -1.0, 0.001));
    const auto rep = kdl::oscillation_report(p, 0.0625, {});
    ASSERT_EQ(rep.per_k.size(), 2U);
    EXPECT_NEAR(rep.max, 0.002, 1e-9);
    EXPECT_NEAR(rep.budget, 0.99 * 0.0625, 1e-15);
}

TEST(Solve, UnperturbedTieAtZero) {
    auto s = setup(1, 0.0);
    const auto tie = kdl::find_mu_tilde(s.problem, s.bundle, s.gap, small_settings());
    EXPECT_LE(std::abs(tie.tie_score), tie.tie_tolerance);
    EXPECT_NEAR(std::abs(tie.m1.x[0]), 0.5, 1e-8);
    EXPECT_NEAR(std::abs(tie.m2.x[0]), 0.5, 1e-8);
    EXPECT_NEAR(tie.m1.x[0] + tie.m2.x[0], 0.0, 1e-6);
    EXPECT_LE(tie.mu.norm2(), s.bundle.sigma);

    const auto third = kdl::third_critical_point(s.problem, tie.mu, tie.m1.x, tie.m2.x, small_settings());
    EXPECT_LE(third.grad_norm, 1e-10);
    EXPECT_GT(third.J, tie.m1.J);
    EXPECT_LT(std::abs(third.x[0]), 0.1);
}

TEST(Solve, ThirdPointRejectsCoincidentMinima) {
    auto s = setup(1, 0.0);
    const kdl::StateVector m{0.5};
    EXPECT_THROW(kdl::third_critical_point(s.problem, kdl::MuVector{0.0}, m, m), kdl::PreconditionError);
}

TEST(Solve, LargeOscillationIsPrecondition) {
    auto s = setup(1, 0.5);
    EXPECT_THROW(kdl::find_mu_tilde(s.problem, s.bundle, s.gap, small_settings()), kdl::PreconditionError);
}

TEST(Solve, CanonicalCertificate) {
    auto s = setup(1, 0.001);
    const auto cert = kdl::solve(s.problem, s.bundle, s.gap, small_settings());
    ASSERT_EQ(cert.solutions.size(), 3U);
    EXPECT_LE(cert.residual_max, cert.cert_tol);
    int globals = 0;
    for (const auto& pt : cert.solutions) globals += pt.kind == kdl::PointKind::global_min;
    EXPECT_EQ(globals, 2);
    EXPECT_LE(cert.mu_tilde.norm2(), s.bundle.sigma);
}

TEST(Certify, RejectsBadPoints) {
    auto s = setup(1, 0.0);
    const kdl::MuVector mu{0.0};
    auto point = [&](double v, kdl::PointKind kind) {
        const kdl::StateVector x{v};
        return kdl::CriticalPoint{x, kdl::evaluate(s.problem, x, mu).J, 0.0, kind, -1};
    };
    const std::vector<kdl::CriticalPoint> good{point(-0.5, kdl::PointKind::global_min),
                                               point(0.5, kdl::PointKind::global_min),
                                               point(0.0, kdl::PointKind::saddle_like)};
    EXPECT_NO_THROW(kdl::certify(s.problem, s.bundle, s.gap, mu, good));

    auto off = good;
    off[2] = point(0.1, kdl::PointKind::saddle_like);
    EXPECT_THROW(kdl::certify(s.problem, s.bundle, s.gap, mu, off), kdl::CertificationError);

    auto duplicate = good;
    duplicate[2] = duplicate[1];
    EXPECT_THROW(kdl::certify(s.problem, s.bundle, s.gap, mu, duplicate), kdl::CertificationError);

    auto two = good;
    two.pop_back();
    EXPECT_THROW(kdl::certify(s.problem, s.bundle, s.gap, mu, two), kdl::CertificationError);

    // at mu != 0 the two minima no longer tie
    const kdl::MuVector tilted{0.05};
    try {
        kdl::certify(s.problem, s.bundle, s.gap, tilted, good);
        FAIL() << "expected CertificationError";
    } catch (const kdl::CertificationError& e) {
        EXPECT_NE(std::string(e.what()).find("residual"), std::string::npos) << e.what();
    }
}
