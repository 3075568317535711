#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kdl/error.hpp"
#include "kdl/model.hpp"

using kdl::ExprFn;
using kdl::Verdict;

TEST(TaggedVector, RejectsNonFinite) {
    EXPECT_THROW(kdl::StateVector({1.0, std::nan("")}), kdl::PreconditionError);
    EXPECT_THROW(kdl::MuVector({INFINITY}), kdl::PreconditionError);
    const kdl::StateVector x{1.0, -2.0};
    EXPECT_EQ((-x)[1], 2.0);
    EXPECT_EQ(kdl::MuVector::zeros(3).norm2(), 0.0);
}

TEST(ProblemSpec, ValidateRejectsBadShapes) {
    auto spec = kdl::canonical_spec(2);
    spec.f.pop_back();
    EXPECT_THROW(spec.validate(), kdl::PreconditionError);

    spec = kdl::canonical_spec(2);
    spec.r = 0.0;
    EXPECT_THROW(spec.validate(), kdl::PreconditionError);

    spec = kdl::canonical_spec(2);
    spec.n = 0;
    EXPECT_THROW(spec.validate(), kdl::PreconditionError);

    spec = kdl::canonical_spec(2);
    spec.f_primitive.resize(1);
    EXPECT_THROW(spec.validate(), kdl::PreconditionError);
}

TEST(Problem, CanonicalPrimitives) {
    const kdl::Problem p(kdl::canonical_spec(3, 2.0, -1.0, 0.01));
    EXPECT_EQ(p.n(), 3);
    EXPECT_NEAR(p.K_primitive(3.0), 6.0, 1e-14);
    EXPECT_NEAR(p.F(1, 1.0), std::numbers::pi / 4, 1e-14);
    EXPECT_NEAR(p.G(2, 0.5), 0.01 * std::sin(0.5), 1e-14);
    EXPECT_EQ(p.F(0, 0.0), 0.0);
}

TEST(Problem, QuadraturePrimitivesMatchClosedForm) {
    auto spec = kdl::canonical_spec(1, 2.0, -1.0, 0.01);
    spec.K_primitive.reset();
    spec.f_primitive.clear();
    spec.g_primitive.clear();
    const kdl::Problem p(spec);
    for (double t : {-5.0, -0.3, 0.0, 0.8, 12.0}) {
        EXPECT_NEAR(p.K_primitive(t), t * t - t, 1e-10 * (1 + std::abs(t))) << t;
        EXPECT_NEAR(p.F(0, t), std::atan(t), 1e-10 * (1 + std::abs(t))) << t;
        EXPECT_NEAR(p.G(0, t), 0.01 * std::sin(t), 1e-10 * (1 + std::abs(t))) << t;
    }
}

TEST(ConditionA, LinearKernelVerified) {
    const auto res = kdl::check_condition_a(ExprFn::parse("2*t - 1"), 10.0);
    EXPECT_EQ(res.verdict, Verdict::verified) << res.note;
    EXPECT_NEAR(res.witness.at("t"), 0.5, 1e-6);
    EXPECT_NEAR(res.witness.at("integral"), -0.25, 1e-10);
    EXPECT_GT(res.witness.at("tail_lower_bound"), 0.0);
}

TEST(ConditionA, PositiveKernelRefuted) {
    const auto res = kdl::check_condition_a(ExprFn::parse("2*t + 1"), 10.0);
    EXPECT_EQ(res.verdict, Verdict::refuted);
}

TEST(ConditionA, DecayingTailNotVerified) {
    // int_0^t K = -t e^{-t} stays negative and its ratio tends to 0
    const auto res = kdl::check_condition_a(ExprFn::parse("(t - 1)*exp(-t)"), 50.0);
    EXPECT_NE(res.verdict, Verdict::verified);
}

TEST(ConditionB, QuadraticGrowthRefuted) {
    EXPECT_EQ(kdl::check_condition_b(ExprFn::parse("t^2")).verdict, Verdict::refuted);
    EXPECT_EQ(kdl::check_condition_b(ExprFn::parse("1/(1+t^2)")).verdict, Verdict::verified);
    EXPECT_EQ(kdl::check_condition_b(ExprFn::parse("t")).verdict, Verdict::verified);
}

TEST(ConditionC, CosineHasRootAtPi) {
    const auto res = kdl::check_condition_c(ExprFn::parse("cos(t)"), 4.0);
    ASSERT_EQ(res.verdict, Verdict::refuted);
    EXPECT_NEAR(res.witness.at("t"), std::numbers::pi, 1e-6);
}

TEST(ConditionC, EvenPrimitiveRefuted) {
    const auto res = kdl::check_condition_c(ExprFn::parse("t"));
    EXPECT_EQ(res.verdict, Verdict::refuted);
    EXPECT_TRUE(res.witness.count("odd_defect") == 1) << res.note;
}

TEST(ConditionC, ArctanVerified) {
    EXPECT_EQ(kdl::check_condition_c(ExprFn::parse("1/(1+t^2)")).verdict, Verdict::verified);
}

TEST(Hypotheses, OverallCombinesClauses) {
    const kdl::Problem good(kdl::canonical_spec(2, 2.0, -1.0, 0.001));
    const auto report = kdl::check_hypotheses(good);
    EXPECT_EQ(report.overall(), Verdict::verified);
    ASSERT_EQ(report.b.size(), 2U);
    ASSERT_EQ(report.c.size(), 2U);

    auto spec = kdl::canonical_spec(2, 2.0, 1.0);
    EXPECT_EQ(kdl::check_hypotheses(kdl::Problem(spec)).overall(), Verdict::refuted);

    kdl::HypothesisReport mixed;
    mixed.a.verdict = Verdict::verified;
    mixed.b = {kdl::ConditionResult{Verdict::inconclusive, "", {}}};
    mixed.c = {kdl::ConditionResult{Verdict::verified, "", {}}};
    EXPECT_EQ(mixed.overall(), Verdict::inconclusive);
    mixed.c[0].verdict = Verdict::refuted;
    EXPECT_EQ(mixed.overall(), Verdict::refuted);
}
