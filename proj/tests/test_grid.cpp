#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "fvslv/errors.hpp"
#include "fvslv/grid.hpp"

using namespace fvslv;

namespace {

double sum_weights(const NonUniformGrid& g) {
    return std::accumulate(g.weights().begin(), g.weights().end(), 0.0);
}

double min_max_width_ratio(const NonUniformGrid& g) {
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        lo = std::min(lo, g.width(i));
        hi = std::max(hi, g.width(i));
    }
    return lo / hi;
}

}  // namespace

TEST(Grid, UniformGeometry) {
    const NonUniformGrid g = make_uniform_grid(0.0, 2.0, 5);
    EXPECT_EQ(g.size(), 5u);
    EXPECT_DOUBLE_EQ(g.width(0), 0.0);
    EXPECT_DOUBLE_EQ(g.width(5), 0.0);
    EXPECT_DOUBLE_EQ(g.width(2), 0.5);
    EXPECT_DOUBLE_EQ(g.face(0), 0.0);
    EXPECT_DOUBLE_EQ(g.face(1), 0.25);
    EXPECT_DOUBLE_EQ(g.face(5), 2.0);
    EXPECT_DOUBLE_EQ(g.weight(0), 0.25);
    EXPECT_DOUBLE_EQ(g.weight(2), 0.5);
    EXPECT_DOUBLE_EQ(sum_weights(g), 2.0);
}

TEST(Grid, RejectsBadInput) {
    EXPECT_THROW(NonUniformGrid({0.0, 1.0}), ArgumentError);
    EXPECT_THROW(NonUniformGrid({0.0, 1.0, 1.0}), ArgumentError);
    EXPECT_THROW(NonUniformGrid({0.0, NAN, 2.0}), ArgumentError);
    EXPECT_THROW(make_sinh_grid(1.0, 0.0, 0.5, 0.1, 10), ArgumentError);
    EXPECT_THROW(make_sinh_grid(0.0, 1.0, 2.0, 0.1, 10), ArgumentError);
    EXPECT_THROW(make_sinh_grid(0.0, 1.0, 0.5, 0.1, 2), ArgumentError);
    EXPECT_THROW(make_sinh_grid(0.0, 1.0, 0.5, -1.0, 10), ArgumentError);
    EXPECT_THROW(make_pinned_grid(0.0, 1.0, 1.5, 0.1, 10), ArgumentError);
}

TEST(Grid, SinhThreeNodesAreSymmetric) {
    const NonUniformGrid g = make_sinh_grid(0.0, 1.0, 0.5, 0.3, 3);
    EXPECT_DOUBLE_EQ(g.node(0), 0.0);
    EXPECT_NEAR(g.node(1), 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(g.node(2), 1.0);
}

TEST(Grid, SinhConcentratesAroundFocus) {
    const NonUniformGrid g = make_sinh_grid(0.0, 3000.0, 100.0, 20.0, 50);
    EXPECT_EQ(g.node(0), 0.0);
    EXPECT_EQ(g.node(49), 3000.0);
    const std::size_t near = g.locate_cell(100.0);
    EXPECT_LT(g.width(near + 1), 0.25 * g.width(49));
    EXPECT_LT(g.width(near + 1), g.width(1));
}

TEST(Grid, WidthRatioDecreasesWithDensity) {
    const double wide = min_max_width_ratio(make_sinh_grid(0.0, 1.0, 0.5, 0.5, 101));
    const double narrow = min_max_width_ratio(make_sinh_grid(0.0, 1.0, 0.5, 0.05, 101));
    const double narrower = min_max_width_ratio(make_sinh_grid(0.0, 1.0, 0.5, 0.01, 101));
    EXPECT_GT(wide, narrow);
    EXPECT_GT(narrow, narrower);
}

TEST(Grid, PinnedContainsPinExactly) {
    const NonUniformGrid g = make_pinned_grid(0.0, 15.0, 0.0348, 0.00348, 200, 0.0);
    const auto k = g.find_node(0.0348);
    ASSERT_TRUE(k.has_value());
    EXPECT_LE(std::abs(g.node(*k) - 0.0348), 4 * std::numeric_limits<double>::epsilon());
    EXPECT_NEAR(sum_weights(g), 15.0, 1e-12);
}

TEST(Grid, PinnedAtLowerEndpoint) {
    const NonUniformGrid g = make_pinned_grid(0.0, 1.0, 0.0, 0.1, 20);
    EXPECT_EQ(g.node(0), 0.0);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g.node(i), g.node(i - 1));
}

TEST(Grid, PinnedWeightsTelescope) {
    for (std::size_t m : {10u, 57u, 300u}) {
        const NonUniformGrid g = make_pinned_grid(-std::log(30.0), std::log(30.0), 0.0, 0.2, m);
        EXPECT_NEAR(sum_weights(g), 2.0 * std::log(30.0), 1e-13);
    }
}

TEST(Grid, PinnedWorksAcrossExperimentSizes) {
    for (std::size_t m = 25; m <= 1000; m += 25) {
        for (double v0 : {0.0625, 0.0348, 0.0154, 0.16}) {
            const NonUniformGrid g = make_pinned_grid(0.0, 15.0, v0, 0.1 * v0, m, 0.0);
            EXPECT_TRUE(g.find_node(v0).has_value()) << "m=" << m << " v0=" << v0;
        }
        const NonUniformGrid s = make_pinned_grid(0.0, 3000.0, 100.0, 20.0, m);
        EXPECT_TRUE(s.find_node(100.0).has_value());
    }
}

TEST(Grid, SmoothnessRatioStaysBounded) {
    double worst = 0.0;
    for (std::size_t m = 50; m <= 1000; m += 50) {
        worst = std::max(worst, make_pinned_grid(0.0, 3000.0, 100.0, 20.0, m).smoothness_ratio());
        worst = std::max(worst,
                         make_pinned_grid(0.0, 15.0, 0.0625, 0.00625, m, 0.0).smoothness_ratio());
        worst = std::max(worst, make_pinned_grid(-std::log(30.0), std::log(30.0), 0.0, 0.2, m)
                                    .smoothness_ratio());
    }
    EXPECT_LT(worst, 5.0);
}

TEST(Grid, LocateCellTieBreaksLow) {
    const NonUniformGrid g = make_uniform_grid(0.0, 4.0, 5);
    EXPECT_EQ(g.locate_cell(0.0), 0u);
    EXPECT_EQ(g.locate_cell(0.5), 0u);  // shared face of cells 0 and 1
    EXPECT_EQ(g.locate_cell(0.6), 1u);
    EXPECT_EQ(g.locate_cell(2.0), 2u);
    EXPECT_EQ(g.locate_cell(4.0), 4u);
    EXPECT_THROW(g.locate_cell(-0.1), ArgumentError);
    EXPECT_THROW(g.locate_cell(4.1), ArgumentError);
}

TEST(Grid, RebuildUsesRecipe) {
    const NonUniformGrid g = make_pinned_grid(0.0, 15.0, 0.0625, 0.00625, 100, 0.0);
    const NonUniformGrid same = rebuild(g, 100);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.node(i), same.node(i));
    const NonUniformGrid coarse = rebuild(g, 50);
    EXPECT_EQ(coarse.size(), 50u);
    EXPECT_TRUE(coarse.find_node(0.0625).has_value());
    EXPECT_THROW(rebuild(make_uniform_grid(0.0, 1.0, 4), 8), ArgumentError);
}
