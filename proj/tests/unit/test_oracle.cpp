#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "kdl/bounds.hpp"
#include "kdl/error.hpp"
#include "kdl/oracle.hpp"

namespace {

kdl::ProblemSpec flat_spec(int n) {
    auto spec = kdl::canonical_spec(n);
    for (auto& f : spec.f) f = kdl::ExprFn::parse("0");
    for (auto& F : spec.f_primitive) F = kdl::ExprFn::parse("0");
    return spec;
}

}  // namespace

TEST(Grid, Coordinates) {
    const kdl::Grid g{2, 1.0, 5};
    EXPECT_EQ(g.size(), 25);
    EXPECT_EQ(g.spacing(), 0.5);
    EXPECT_EQ(g.coordinate(0), -1.0);
    EXPECT_EQ(g.coordinate(2), 0.0);
    EXPECT_EQ(g.coordinate(4), 1.0);
    EXPECT_EQ(g.multi_index(7), (std::vector<int>{1, 2}));
    EXPECT_EQ(g.point(7), Eigen::Vector2d(-0.5, 0.0));
}

TEST(Oracle, FlatProblemMinimaAndCells) {
    const kdl::Problem p(flat_spec(1));
    const auto res = kdl::grid_min(p, kdl::MuVector{0.0}, 1.0, 201);
    EXPECT_NEAR(res.J, -0.125, 1e-12);
    ASSERT_EQ(res.argmins.size(), 2U);
    EXPECT_NEAR(res.argmins[0][0], -0.5, 1e-12);
    EXPECT_NEAR(res.argmins[1][0], 0.5, 1e-12);

    // with 100 nodes none of the critical points -1/2, 0, 1/2 is a grid node
    const auto cells = kdl::grid_critical_points(p, kdl::MuVector{0.0}, 1.0, 100);
    ASSERT_EQ(cells.size(), 3U);
    for (double c : {-0.5, 0.0, 0.5}) {
        int hits = 0;
        for (const auto& cell : cells) hits += cell.contains(Eigen::VectorXd::Constant(1, c));
        EXPECT_EQ(hits, 1) << c;
    }
}

TEST(Oracle, FlatProblemHasNoGap) {
    const kdl::Problem p(flat_spec(2));
    const auto bundle = kdl::build_bundle(p);
    const auto res = kdl::grid_gap(p, bundle, 1.0, 101, 5);
    EXPECT_NEAR(res.alpha, res.beta, 1e-15);
    EXPECT_EQ(res.delta, 0.0);
}

TEST(Oracle, RefinementApproachesDelta) {
    const kdl::Problem p(kdl::canonical_spec(1));
    const auto bundle = kdl::build_bundle(p);
    const double box = kdl::oracle_box_radius(bundle, 1);
    double previous = INFINITY;
    for (int ppd : {11, 101, 1001}) {
        const auto res = kdl::grid_gap(p, bundle, box, ppd, 21);
        const double err = std::abs(res.delta - 0.125);
        EXPECT_LE(err, previous + 1e-12) << ppd;
        previous = err;
    }
    EXPECT_LE(previous, 1e-3);
}

TEST(Oracle, GridMinIndependentOfJobs) {
    const kdl::Problem p(kdl::canonical_spec(2, 2.0, -1.0, 0.01));
    const auto a = kdl::grid_min(p, kdl::MuVector{0.01, -0.02}, 1.0, 61, 1e-7, 1);
    const auto b = kdl::grid_min(p, kdl::MuVector{0.01, -0.02}, 1.0, 61, 1e-7, 3);
    EXPECT_EQ(a.J, b.J);
    EXPECT_EQ(a.x, b.x);
}

TEST(Oracle, LandscapeRowCount) {
    const kdl::Problem p(kdl::canonical_spec(2));
    std::ostringstream out;
    kdl::write_landscape_csv(out, p, kdl::MuVector::zeros(2), 1.0, 7);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x1,x2,J");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 49);
}

TEST(Oracle, Preconditions) {
    const kdl::Problem p4(kdl::canonical_spec(4));
    EXPECT_THROW(kdl::grid_min(p4, kdl::MuVector::zeros(4), 1.0, 5), kdl::PreconditionError);
    const kdl::Problem p1(kdl::canonical_spec(1));
    EXPECT_THROW(kdl::grid_min(p1, kdl::MuVector{0.0}, 1.0, 0), kdl::PreconditionError);
    EXPECT_THROW(kdl::grid_min(p1, kdl::MuVector{0.0}, 1.0, 2002), kdl::PreconditionError);
    const auto bundle = kdl::build_bundle(p1);
    EXPECT_THROW(kdl::grid_gap(p1, bundle, 1.0, 11, 4), kdl::PreconditionError);
}
