#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fvslv/errors.hpp"
#include "fvslv/lv_surface.hpp"

using namespace fvslv;

TEST(LvSurface, ClosedForm) {
    const LvSurface s = LvSurface::closed_form([](double x, double t) { return 0.2 + x * t; });
    EXPECT_DOUBLE_EQ(s(0.5, 2.0), 1.2);
    EXPECT_FALSE(s.time_independent());
    EXPECT_FALSE(s.is_lattice());
    EXPECT_THROW(LvSurface::closed_form({}), ArgumentError);
}

TEST(LvSurface, BilinearInsideFlatOutside) {
    // sigma = 0.1 + 0.05 x + 0.02 tau on a 2 x 3 lattice; bilinear is exact.
    const std::vector<double> taus{0.0, 1.0}, xs{-1.0, 0.0, 2.0};
    std::vector<double> v;
    for (double t : taus) {
        for (double x : xs) v.push_back(0.2 + 0.05 * x + 0.02 * t);
    }
    const LvSurface s = LvSurface::lattice(taus, xs, v);
    EXPECT_TRUE(s.is_lattice());
    EXPECT_FALSE(s.time_independent());
    EXPECT_NEAR(s(0.7, 0.3), 0.2 + 0.035 + 0.006, 1e-15);
    EXPECT_NEAR(s(-5.0, 0.5), 0.2 - 0.05 + 0.01, 1e-15);
    EXPECT_NEAR(s(3.0, 4.0), 0.2 + 0.1 + 0.02, 1e-15);
    EXPECT_NEAR(s(0.0, -1.0), 0.2, 1e-15);
}

TEST(LvSurface, SingleLevelIsTimeIndependent) {
    const LvSurface s = LvSurface::lattice({0.5}, {0.0, 1.0}, {0.2, 0.4});
    EXPECT_TRUE(s.time_independent());
    EXPECT_DOUBLE_EQ(s(0.5, 3.0), 0.3);
}

TEST(LvSurface, LatticeValidation) {
    EXPECT_THROW(LvSurface::lattice({0.0}, {0.0, 1.0}, {0.2}), ConfigError);
    EXPECT_THROW(LvSurface::lattice({0.0}, {1.0, 0.0}, {0.2, 0.2}), ConfigError);
    EXPECT_THROW(LvSurface::lattice({0.0}, {0.0, 1.0}, {0.2, 0.0}), ConfigError);
    EXPECT_THROW(LvSurface::lattice({}, {}, {}), ConfigError);
}

TEST(LvSurface, SyntheticSmileShape) {
    const SyntheticSmile smile{};
    EXPECT_DOUBLE_EQ(smile(0.0), 0.10);
    EXPECT_NEAR(smile(10.0), 0.20, 1e-15);
    EXPECT_DOUBLE_EQ(smile(0.3), smile(-0.3));
    EXPECT_GT(smile(0.3), smile(0.1));
    const LvSurface s = smile.surface();
    EXPECT_TRUE(s.time_independent());
    EXPECT_DOUBLE_EQ(s(0.3, 0.7), smile(0.3));
    EXPECT_THROW((SyntheticSmile{0.0, 0.1, 4.0, 0.0}.surface()), ArgumentError);
}

TEST(LvSurface, ReadsCsv) {
    std::istringstream in("tau,x,sigma_lv\n0,-1,0.3\n0,1,0.2\r\n\n1,-1,0.25\n1,1,0.15\n");
    const LvSurface s = read_lv_surface_csv(in);
    ASSERT_EQ(s.taus().size(), 2u);
    ASSERT_EQ(s.xs().size(), 2u);
    EXPECT_DOUBLE_EQ(s(0.0, 0.5), 0.225);
}

TEST(LvSurface, RejectsMalformedCsv) {
    const char* bad[] = {
        "",
        "t,x,s\n0,0,0.2\n",
        "tau,x,sigma_lv\n",
        "tau,x,sigma_lv\n0,0,abc\n",
        "tau,x,sigma_lv\n0,0\n",
        "tau,x,sigma_lv\n0,0,0.2,1\n",
        "tau,x,sigma_lv\n0,0,0.2\n0,1,0.2\n1,0,0.2\n",
        "tau,x,sigma_lv\n0,0,0.2\n0,1,-0.2\n",
        "tau,x,sigma_lv\n0,0,0.2x\n",
    };
    for (const char* text : bad) {
        std::istringstream in(text);
        EXPECT_THROW(read_lv_surface_csv(in), ConfigError) << text;
    }
    EXPECT_THROW(read_lv_surface_csv(std::string("/nonexistent/lv.csv")), ConfigError);
}
