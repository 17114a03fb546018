#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "fvslv/calibration.hpp"
#include "fvslv/errors.hpp"
#include "fvslv/experiments.hpp"
#include "fvslv/models.hpp"

using namespace fvslv;

namespace {

std::function<double(double)> identity() {
    return [](double v) { return v; };
}

struct SmallSetup {
    SlvParams slv = find_set("G").params;
    NonUniformGrid gx = make_log_grid(0.0, std::log(30.0), 0.2, 40);
    NonUniformGrid gv = make_variance_grid(slv.v0, 15.0, 0.1 * slv.v0, 24);
    LvSurface lv = SyntheticSmile{}.surface();
};

double max_abs_diff(const LeverageSurface& a, const LeverageSurface& b, std::size_t stride_b) {
    double worst = 0.0;
    for (std::size_t n = 0; n < a.levels(); ++n) {
        for (std::size_t i = 0; i < a.nodes(); ++i) {
            worst = std::max(worst, std::abs(a(i, n) - b(i, n * stride_b)));
        }
    }
    return worst;
}

}  // namespace

TEST(ConditionalExpectation, SingleColumnCollapses) {
    const NonUniformGrid gx = make_uniform_grid(0.0, 1.0, 3);
    const NonUniformGrid gv = make_uniform_grid(0.0, 2.0, 5);
    DensityField p(gx, gv);
    p(0, 3) = 4.0;
    p(1, 1) = -2.0;
    const std::vector<double> fallback{7.0, 7.0, 7.0};
    const std::vector<double> e = conditional_expectation(p, gv, identity(), fallback);
    EXPECT_DOUBLE_EQ(e[0], 1.5);
    EXPECT_DOUBLE_EQ(e[1], 0.5);
    EXPECT_EQ(e[2], 7.0);
}

TEST(ConditionalExpectation, TwoColumnHandComputation) {
    const NonUniformGrid gx = make_uniform_grid(0.0, 1.0, 3);
    const NonUniformGrid gv = make_sinh_grid(0.0, 1.0, 0.0, 0.3, 6);
    DensityField p(gx, gv);
    const double a = 0.8, b = 2.5;
    p(0, 1) = a;
    p(0, 4) = b;
    p(1, 1) = a;
    p(1, 4) = -b;
    const double v1 = gv.node(1), v2 = gv.node(4), w1 = gv.weight(1), w2 = gv.weight(4);
    const double expected = (v1 * a * w1 + v2 * b * w2) / (a * w1 + b * w2);
    const std::vector<double> e =
        conditional_expectation(p, gv, identity(), std::vector<double>{1.0, 1.0, 1.0});
    EXPECT_NEAR(e[0], expected, 1e-15);
    EXPECT_EQ(e[0], e[1]);
    EXPECT_THROW(conditional_expectation(p, gv, identity(), std::vector<double>{1.0, 1.0}),
                 ArgumentError);
}

TEST(LeverageUpdate, Arithmetic) {
    const std::vector<double> lv{0.2, 0.3};
    const std::vector<double> one = leverage_update(lv, std::vector<double>{1.0, 1.0});
    EXPECT_EQ(one[0], 0.2);
    EXPECT_EQ(one[1], 0.3);
    EXPECT_DOUBLE_EQ(leverage_update(lv, std::vector<double>{0.04, 0.09})[0], 1.0);
    EXPECT_DOUBLE_EQ(leverage_update(lv, std::vector<double>{0.04, 0.09})[1], 1.0);
    EXPECT_THROW(leverage_update(lv, std::vector<double>{0.04, 0.0}), CalibrationError);
    EXPECT_THROW(leverage_update(lv, std::vector<double>{0.04}), ArgumentError);
}

TEST(MarginalDensity, DiracAndConstantFields) {
    const NonUniformGrid gx = make_sinh_grid(-1.0, 1.0, 0.0, 0.5, 9);
    const NonUniformGrid gv = make_sinh_grid(0.0, 3.0, 0.0, 0.5, 8);
    const DensityField d = dirac_initial_2d(gx, gv, gx.node(4), gv.node(3));
    const std::vector<double> md = marginal_density(d, gv);
    for (std::size_t i = 0; i < gx.size(); ++i) {
        EXPECT_NEAR(md[i], i == 4 ? 1.0 / gx.weight(4) : 0.0, 1e-14);
    }
    DensityField c(gx, gv);
    c.assign(std::vector<double>(c.size(), 0.7));
    const std::vector<double> mc = marginal_density(c, gv);
    for (double v : mc) EXPECT_NEAR(v, 0.7 * 3.0, 1e-14);
    double mass = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) mass += mc[i] * gx.weight(i);
    EXPECT_NEAR(mass, total_mass(c), 1e-14);
}

TEST(LeverageSurface, ColumnsAndCsv) {
    LeverageSurface s({-1.0, 0.0, 1.0}, {0.0, 0.5});
    s.set_column(1, std::vector<double>{1.0, 2.0, 3.0});
    EXPECT_EQ(s(2, 1), 3.0);
    EXPECT_EQ(s.column(0)[1], 0.0);
    EXPECT_THROW(s.set_column(2, std::vector<double>{1.0, 2.0, 3.0}), ArgumentError);
    EXPECT_THROW(s.set_column(0, std::vector<double>{1.0}), ArgumentError);
}

TEST(PiecewiseLinear, InterpolatesAndHoldsEnds) {
    const PiecewiseLinear f({0.0, 1.0, 3.0}, {1.0, 3.0, 2.0});
    EXPECT_EQ(f(-1.0), 1.0);
    EXPECT_DOUBLE_EQ(f(0.5), 2.0);
    EXPECT_DOUBLE_EQ(f(2.0), 2.5);
    EXPECT_EQ(f(9.0), 2.0);
    EXPECT_THROW(PiecewiseLinear({0.0}, {}), ArgumentError);
}

TEST(Calibrate, FirstColumnCopiesSecondAndMassIsKept) {
    SmallSetup s;
    CalibrationOptions opts;
    const CalibrationResult r = calibrate(s.slv, s.lv, s.gx, s.gv, TimeGrid(0.2, 8), opts);
    ASSERT_EQ(r.leverage.levels(), 9u);
    for (std::size_t i = 0; i < r.leverage.nodes(); ++i) {
        EXPECT_EQ(r.leverage(i, 0), r.leverage(i, 1));
        for (std::size_t n = 0; n < 9; ++n) {
            EXPECT_TRUE(std::isfinite(r.leverage(i, n)));
            EXPECT_GT(r.leverage(i, n), 0.0);
        }
    }
    EXPECT_LT(r.stats.max_mass_drift, 1e-10);
    EXPECT_EQ(r.stats.implicit_euler_half_steps, 4u);
    EXPECT_EQ(r.stats.hv_steps, 6u);
}

TEST(Calibrate, WithoutStartupAndSingleInnerIteration) {
    SmallSetup s;
    CalibrationOptions opts;
    opts.hv.rannacher_steps = 0;
    opts.inner_iterations = 1;
    const CalibrationResult r = calibrate(s.slv, s.lv, s.gx, s.gv, TimeGrid(0.1, 4), opts);
    EXPECT_EQ(r.stats.hv_steps, 4u);
    EXPECT_LT(r.stats.max_mass_drift, 1e-10);
    opts.inner_iterations = 0;
    EXPECT_THROW(calibrate(s.slv, s.lv, s.gx, s.gv, TimeGrid(0.1, 4), opts), ArgumentError);
}

TEST(Calibrate, InnerIterationCountMattersLessThanTimeStep) {
    SmallSetup s;
    auto run = [&](std::size_t steps, std::size_t q) {
        CalibrationOptions opts;
        opts.inner_iterations = q;
        return calibrate(s.slv, s.lv, s.gx, s.gv, TimeGrid(0.1, steps), opts).leverage;
    };
    const LeverageSurface q2 = run(10, 2);
    const double q_gap = max_abs_diff(q2, run(10, 5), 1);
    const double dt_gap = max_abs_diff(q2, run(20, 2), 2);
    EXPECT_LT(q_gap, dt_gap);
}

TEST(Calibrate, RecoversKnownLeverage) {
    // Forward SLV with a fixed leverage L gives sigma_lv^2 = L^2 E[psi^2(V) | X];
    // calibrating against that surface must return L.
    SmallSetup s;
    s.slv.xi = 0.5;
    auto leverage = [](double x) { return 1.0 + 0.3 * std::tanh(2.0 * x); };
    const TimeGrid tg(0.2, 10);
    const Coefficients2D c =
        slv_coefficients(s.slv, [&](double x, double) { return leverage(x); });
    std::vector<double> taus{0.0};
    std::vector<double> values;
    for (std::size_t i = 0; i < s.gx.size(); ++i) {
        values.push_back(leverage(s.gx.node(i)) * std::sqrt(s.slv.v0));
    }
    EvolveOptions eo;
    eo.autonomous = true;
    eo.observer = [&](const StepInfo& info, std::span<const double> state) {
        DensityField f(s.gx, s.gv);
        f.assign(state);
        const std::vector<double> e = conditional_expectation(
            f, s.gv, identity(), std::vector<double>(s.gx.size(), s.slv.v0));
        taus.push_back(info.tau);
        for (std::size_t i = 0; i < s.gx.size(); ++i) {
            values.push_back(leverage(s.gx.node(i)) * std::sqrt(e[i]));
        }
    };
    hv_evolve([&](double tau) { return assemble_2d(s.gx, s.gv, c, tau, s.slv.zero_attainable()); },
              dirac_initial_2d(s.gx, s.gv, 0.0, s.slv.v0), tg, HvConfig{}, eo);
    const LvSurface lv = LvSurface::lattice(taus, {s.gx.nodes().begin(), s.gx.nodes().end()},
                                            values);
    CalibrationOptions opts;
    opts.inner_iterations = 5;
    const CalibrationResult r = calibrate(s.slv, lv, s.gx, s.gv, tg, opts);
    for (std::size_t n = 1; n <= tg.steps(); ++n) {
        for (std::size_t i = 0; i < s.gx.size(); ++i) {
            if (std::abs(s.gx.node(i)) > 0.3) continue;
            EXPECT_NEAR(r.leverage(i, n), leverage(s.gx.node(i)), 2e-2)
                << "x=" << s.gx.node(i) << " n=" << n;
        }
    }
}

TEST(LvDensity1d, MatchesLognormalForConstantVol) {
    const double sigma = 0.2, r_d = 0.03, r_f = 0.01, horizon = 1.0;
    const LvSurface lv = LvSurface::closed_form([sigma](double, double) { return sigma; }, true);
    auto error = [&](std::size_t m) {
        const NonUniformGrid gx = make_log_grid(0.0, std::log(30.0), 0.2, m);
        EvolveStats stats;
        const DensityField p =
            lv_density_1d(lv, r_d, r_f, gx, 0.0, TimeGrid(horizon, 1000), 2, {}, &stats);
        EXPECT_LT(stats.max_mass_drift, 1e-12);
        const double mean = (r_d - r_f - 0.5 * sigma * sigma) * horizon;
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double z = (gx.node(i) - mean) / sigma;
            const double exact = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
            worst = std::max(worst, std::abs(p(i) - exact));
        }
        return worst;
    };
    const double e1 = error(100), e2 = error(200);
    EXPECT_LT(e1, 1e-2);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.3);
}
