#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kdl/error.hpp"
#include "kdl/expr.hpp"

using kdl::ExprFn;
using kdl::ExprNode;

TEST(Expr, AffineTree) {
    const auto f = ExprFn::parse("2*t - 1");
    const auto& root = f.root();
    ASSERT_EQ(root.kind, ExprNode::Kind::sub);
    EXPECT_EQ(root.args[0]->kind, ExprNode::Kind::mul);
    EXPECT_EQ(root.args[0]->args[0]->value, 2.0);
    EXPECT_EQ(root.args[0]->args[1]->kind, ExprNode::Kind::variable);
    EXPECT_EQ(root.args[1]->value, 1.0);
    EXPECT_EQ(f(2.0), 3.0);
}

TEST(Expr, DivisionAndPower) {
    const auto f = ExprFn::parse("1/(1+t^2)");
    ASSERT_EQ(f.root().kind, ExprNode::Kind::div);
    EXPECT_EQ(f.root().args[1]->args[1]->kind, ExprNode::Kind::pow);
    EXPECT_EQ(f(0.0), 1.0);
    EXPECT_DOUBLE_EQ(f(2.0), 0.2);
}

TEST(Expr, DoubleStarIsRejectedAtSecondStar) {
    try {
        ExprFn::parse("2**t");
        FAIL() << "expected ParseError";
    } catch (const kdl::ParseError& e) {
        EXPECT_EQ(e.offset(), 2U);
    }
}

TEST(Expr, PowerBindsTighterThanUnaryMinus) {
    EXPECT_EQ(ExprFn::parse("-t^2")(3.0), -9.0);
    EXPECT_EQ(ExprFn::parse("(-t)^2")(3.0), 9.0);
    EXPECT_EQ(ExprFn::parse("2^-1")(0.0), 0.5);
}

TEST(Expr, Precedence) {
    EXPECT_EQ(ExprFn::parse("1 + 2*3")(0.0), 7.0);
    EXPECT_EQ(ExprFn::parse("8/4/2")(0.0), 1.0);
    EXPECT_EQ(ExprFn::parse("8 - 4 - 2")(0.0), 2.0);
    EXPECT_EQ(ExprFn::parse("2*t^3")(2.0), 16.0);
}

TEST(Expr, Functions) {
    EXPECT_NEAR(ExprFn::parse("atan(t)")(1.0), std::numbers::pi / 4, 1e-16);
    EXPECT_EQ(ExprFn::parse("max(t, 2)")(1.0), 2.0);
    EXPECT_EQ(ExprFn::parse("min(t, 2)")(1.0), 1.0);
    EXPECT_EQ(ExprFn::parse("abs(t)")(-3.5), 3.5);
    EXPECT_EQ(ExprFn::parse("sqrt(t)")(9.0), 3.0);
    EXPECT_NEAR(ExprFn::parse("exp(log(t))")(2.5), 2.5, 1e-15);
    EXPECT_NEAR(ExprFn::parse("0.001*cos(t)")(0.0), 0.001, 0.0);
    EXPECT_NEAR(ExprFn::parse("1e-3*sin(t)")(std::numbers::pi / 2), 1e-3, 1e-18);
}

TEST(Expr, DomainErrors) {
    EXPECT_THROW(ExprFn::parse("log(t)")(-1.0), kdl::DomainError);
    EXPECT_THROW(ExprFn::parse("log(t)")(0.0), kdl::DomainError);
    EXPECT_THROW(ExprFn::parse("sqrt(t)")(-1e-300), kdl::DomainError);
    EXPECT_THROW(ExprFn::parse("1/t")(0.0), kdl::DomainError);
    EXPECT_THROW(ExprFn::parse("exp(t)")(1e4), kdl::DomainError);
    EXPECT_THROW(ExprFn::parse("t")(std::nan("")), kdl::DomainError);
}

TEST(Expr, SyntaxErrors) {
    EXPECT_THROW(ExprFn::parse(""), kdl::ParseError);
    EXPECT_THROW(ExprFn::parse("2*"), kdl::ParseError);
    EXPECT_THROW(ExprFn::parse("(t"), kdl::ParseError);
    EXPECT_THROW(ExprFn::parse("t)"), kdl::ParseError);
    EXPECT_THROW(ExprFn::parse("x + 1"), kdl::ParseError);
    EXPECT_THROW(ExprFn::parse("foo(t)"), kdl::ParseError);
    EXPECT_THROW(ExprFn::parse("sin(t, t)"), kdl::ParseError);
    EXPECT_THROW(ExprFn::parse("max(t)"), kdl::ParseError);
    EXPECT_THROW(ExprFn::parse("t^0.5"), kdl::ParseError);
    EXPECT_THROW(ExprFn::parse("t^t"), kdl::ParseError);
}

TEST(Expr, UnknownIdentifierOffset) {
    try {
        ExprFn::parse("2*t + y");
        FAIL() << "expected ParseError";
    } catch (const kdl::ParseError& e) {
        EXPECT_EQ(e.offset(), 6U);
    }
}

TEST(Expr, CanonicalRenderingRoundTrips) {
    for (const char* src : {"2*t - 1", "1/(1+t^2)", "-t^2 + 3*sin(t)", "max(t, -2.5e-3) / (1 + abs(t))",
                            "0.001*cos(t)", "t^-2", "--t"}) {
        const auto f = ExprFn::parse(src);
        const auto g = ExprFn::parse(f.to_string());
        EXPECT_TRUE(f == g) << src << " -> " << f.to_string();
        EXPECT_EQ(g.to_string(), f.to_string());
        for (double t : {-1.7, 0.3, 2.0}) EXPECT_EQ(f(t), g(t)) << src;
    }
}

TEST(Expr, WhitespaceIsIgnored) {
    EXPECT_TRUE(ExprFn::parse(" 2 * t\t-1 ") == ExprFn::parse("2*t-1"));
    EXPECT_EQ(ExprFn::parse(" 2 * t\t-1 ").source(), " 2 * t\t-1 ");
}
