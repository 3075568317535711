#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "kdl/optimize.hpp"
#include "kdl/sampling.hpp"

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    if (g != nullptr) {
        g->resize(2);
        (*g)[0] = -2.0 * a - 400.0 * x[0] * b;
        (*g)[1] = 200.0 * b;
    }
    return a * a + 100.0 * b * b;
}

// Double well (x^2 - 1)^2 + y^2: minima at (+-1, 0).
double double_well(const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    const double w = x[0] * x[0] - 1.0;
    if (g != nullptr) {
        g->resize(2);
        (*g)[0] = 4.0 * x[0] * w;
        (*g)[1] = 2.0 * x[1];
    }
    return w * w + x[1] * x[1];
}

}  // namespace

TEST(Sampling, SpacesAndRoots) {
    const auto lin = kdl::lin_space(0.0, 1.0, 5);
    ASSERT_EQ(lin.size(), 5U);
    EXPECT_EQ(lin.front(), 0.0);
    EXPECT_EQ(lin.back(), 1.0);
    const auto lg = kdl::log_space(1e-3, 1e3, 7);
    EXPECT_NEAR(lg[3], 1.0, 1e-12);
    EXPECT_NEAR(kdl::bisect_root([](double t) { return t * t - 2.0; }, 0.0, 2.0), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(kdl::golden_section_minimize([](double t) { return (t - 0.3) * (t - 0.3); }, -1.0, 1.0), 0.3, 1e-7);
}

TEST(Sampling, HaltonBall) {
    EXPECT_EQ(kdl::radical_inverse(1, 2), 0.5);
    EXPECT_EQ(kdl::radical_inverse(3, 2), 0.75);
    EXPECT_NEAR(kdl::radical_inverse(1, 3), 1.0 / 3.0, 1e-16);
    const auto pts = kdl::halton_ball(3, 200, 0.7);
    ASSERT_EQ(pts.size(), 200U);
    for (const auto& p : pts) EXPECT_LE(p.norm(), 0.7 * (1 + 1e-15));
    EXPECT_EQ(kdl::halton_ball(3, 200, 0.7), pts);
}

TEST(Optimize, BfgsRosenbrock) {
    const auto res = kdl::minimize_bfgs(rosenbrock, Eigen::Vector2d(-1.2, 1.0));
    EXPECT_TRUE(res.converged()) << kdl::to_string(res.reason);
    EXPECT_NEAR(res.x[0], 1.0, 1e-8);
    EXPECT_NEAR(res.x[1], 1.0, 1e-8);
    EXPECT_LE(res.grad_norm, 1e-10);
}

TEST(Optimize, NewtonSolveOnGradientField) {
    const kdl::VectorFieldFn field = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd g;
        double_well(x, &g);
        return g;
    };
    const auto res = kdl::newton_solve(field, Eigen::Vector2d(0.8, 0.3), 1e-13);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.x[0], 1.0, 1e-12);
    EXPECT_NEAR(res.x[1], 0.0, 1e-12);

    const Eigen::MatrixXd J = kdl::fd_jacobian(field, Eigen::Vector2d(1.0, 0.0));
    EXPECT_NEAR(J(0, 0), 8.0, 1e-6);
    EXPECT_NEAR(J(1, 1), 2.0, 1e-6);
    EXPECT_NEAR(J(0, 1), 0.0, 1e-6);
}

TEST(Optimize, ClusterOrderIndependent) {
    auto starts = kdl::make_starts(2, 24, 3.0, 42);
    starts.erase(starts.begin());  // the origin is a saddle of the double well
    const auto ms = kdl::multistart(double_well, starts, {}, 1);
    ASSERT_EQ(ms.basins.size(), 2U);
    EXPECT_NEAR(ms.basins[0].x[0], -1.0, 1e-10);  // equal values: lexicographic order
    EXPECT_NEAR(ms.basins[1].x[0], 1.0, 1e-10);

    auto shuffled = ms.runs;
    std::mt19937_64 rng(1);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto again = kdl::cluster_basins(shuffled, 1e-6, 1e-6);
    ASSERT_EQ(again.size(), ms.basins.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
        EXPECT_EQ(again[i].hits, ms.basins[i].hits);
        EXPECT_NEAR((again[i].x - ms.basins[i].x).norm(), 0.0, 1e-9);
    }
}

TEST(Optimize, MultistartIndependentOfJobs) {
    const auto starts = kdl::make_starts(2, 16, 2.0, 3);
    const auto a = kdl::multistart(double_well, starts, {}, 1);
    const auto b = kdl::multistart(double_well, starts, {}, 4);
    ASSERT_EQ(a.runs.size(), b.runs.size());
    for (std::size_t i = 0; i < a.runs.size(); ++i) EXPECT_EQ(a.runs[i].x, b.runs[i].x);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Optimize, StartsDeterministic) {
    const auto a = kdl::make_starts(4, 10, 2.0, 99);
    const auto b = kdl::make_starts(4, 10, 2.0, 99);
    const auto c = kdl::make_starts(4, 10, 2.0, 100);
    ASSERT_EQ(a.size(), 10U);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_EQ(a[0], Eigen::VectorXd::Zero(4));
    EXPECT_EQ(a[1], -a[2]);
}

TEST(Optimize, ParallelForRethrowsLowestIndex) {
    std::atomic<int> ran{0};
    try {
        kdl::parallel_for(20, 4, [&](std::size_t i) {
            ++ran;
            if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
        });
        FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "7");
    }
    EXPECT_EQ(kdl::resolve_jobs(3), 3U);
    EXPECT_GE(kdl::resolve_jobs(0), 1U);
}
