#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "fvslv/errors.hpp"
#include "fvslv/experiments.hpp"
#include "fvslv/models.hpp"

using namespace fvslv;
using boost::math::quadrature::gauss_kronrod;

namespace {

const BsParams1D kBs{0.03, 0.01, 0.2, 100.0};

CirParams cir_set(const char* name) { return find_set(name).params.variance(); }

}  // namespace

TEST(Models, BlackScholesCoefficients) {
    const Coefficients1D c = bs1d_coefficients(kBs);
    EXPECT_EQ(c.drift(0.0, 0.0), 0.0);
    EXPECT_EQ(c.diffusion(0.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(c.diffusion(100.0, 0.3), 20.0);
    EXPECT_DOUBLE_EQ(c.drift(50.0, 0.0), 1.0);
    const Coefficients1D flat = bs1d_coefficients({0.02, 0.02, 0.2, 100.0});
    EXPECT_EQ(flat.drift(123.0, 0.0), 0.0);
    EXPECT_THROW(bs1d_coefficients({0.0, 0.0, -0.2, 100.0}), ArgumentError);
}

TEST(Models, BlackScholesDensityIntegratesToOne) {
    // In y = log s the integrand is p(e^y) e^y.
    auto f = [](double y) { return bs1d_exact_density(kBs, std::exp(y), 1.0) * std::exp(y); };
    const double mass = gauss_kronrod<double, 61>::integrate(f, std::log(100.0) - 3.0,
                                                             std::log(100.0) + 3.0, 15, 1e-13);
    EXPECT_NEAR(mass, 1.0, 1e-8);
    EXPECT_THROW(bs1d_exact_density(kBs, 0.0, 1.0), ArgumentError);
    EXPECT_THROW(bs1d_exact_density(kBs, 100.0, 0.0), ArgumentError);
}

TEST(Models, BlackScholesModeForSmallTau) {
    // Lognormal mode exp(m - s^2) with m = log S0 + (mu - sigma^2/2) tau, s^2 = sigma^2 tau.
    const double tau = 1e-3;
    const double mode = 100.0 * std::exp((0.02 - 0.02) * tau - 0.04 * tau);
    const double h = 1e-3;
    const double at = bs1d_exact_density(kBs, mode, tau);
    EXPECT_GT(at, bs1d_exact_density(kBs, mode + h, tau));
    EXPECT_GT(at, bs1d_exact_density(kBs, mode - h, tau));
    EXPECT_NEAR(bs1d_log_density(kBs, mode, tau), std::log(at), 1e-12);
}

TEST(Models, CirFellerIndex) {
    EXPECT_NEAR(cir_set("A").q(), 0.98, 0.005);
    EXPECT_NEAR(cir_set("B").q(), -0.47, 0.005);
    EXPECT_NEAR(find_set("G").params.q(), -0.20, 0.005);
    const Coefficients1D c = cir_coefficients(cir_set("A"));
    EXPECT_EQ(c.drift(0.16, 0.0), 0.0);
    EXPECT_EQ(c.diffusion(0.0, 0.0), 0.0);
}

TEST(Models, CirDensityIntegratesToOne) {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (const char* name : {"A", "B"}) {
        const CirParams p = cir_set(name);
        auto f = [&](double v) { return cir_exact_density(p, v, 0.25); };
        const double mass = ts.integrate(f, 0.0, 1.0, 1e-12) + ts.integrate(f, 1.0, 15.0, 1e-12);
        EXPECT_NEAR(mass, 1.0, 1e-6) << name;
    }
}

TEST(Models, CirDensityAtZero) {
    const CirParams a = cir_set("A");
    EXPECT_EQ(cir_exact_density(a, 0.0, 0.25), 0.0);
    EXPECT_THROW(cir_exact_density(cir_set("B"), 0.0, 0.25), EvaluationError);
    // q = 0 exactly: finite positive value c exp(-u0).
    const CirParams q0{1.0, 0.045, 0.3, 0.04};
    ASSERT_EQ(q0.q(), 0.0);
    const double c = 2.0 / (0.09 * -std::expm1(-0.5));
    EXPECT_NEAR(cir_exact_density(q0, 0.0, 0.5), c * std::exp(-c * 0.04 * std::exp(-0.5)), 1e-10);
}

TEST(Models, CirDensityBlowsUpWithoutFeller) {
    const CirParams b = cir_set("B");
    double last = 0.0;
    for (double v = 1e-3; v > 1e-12; v /= 10.0) {
        const double d = cir_exact_density(b, v, 0.25);
        EXPECT_GT(d, last);
        last = d;
    }
}

TEST(Models, DensitiesAreNonNegative) {
    const CirParams a = cir_set("A"), b = cir_set("B");
    for (double v = 1e-8; v < 15.0; v *= 1.7) {
        EXPECT_GE(cir_exact_density(a, v, 0.25), 0.0);
        EXPECT_GE(cir_exact_density(b, v, 0.01), 0.0);
        EXPECT_GE(bs1d_exact_density(kBs, v * 100.0, 0.5), 0.0);
    }
}

TEST(Models, BlackScholes2dDensityIntegratesToOne) {
    const Bs2dParams p{0.03, 0.2, 0.25, -0.7, 100.0, 100.0};
    const double l = std::log(100.0);
    auto inner = [&](double y1) {
        auto g = [&](double y2) {
            return bs2d_exact_density(p, std::exp(y1), std::exp(y2), 1.0) * std::exp(y1 + y2);
        };
        return gauss_kronrod<double, 61>::integrate(g, l - 3.0, l + 3.0, 15, 1e-13);
    };
    const double mass = gauss_kronrod<double, 61>::integrate(inner, l - 3.0, l + 3.0, 15, 1e-13);
    EXPECT_NEAR(mass, 1.0, 1e-8);
    Bs2dParams degenerate = p;
    degenerate.rho = 1.0;
    EXPECT_THROW(bs2d_exact_density(degenerate, 100.0, 100.0, 1.0), ArgumentError);
    const Coefficients2D c = bs2d_coefficients(p);
    EXPECT_DOUBLE_EQ(c.diffusion_y(1.0, 100.0, 0.0), 25.0);
    EXPECT_DOUBLE_EQ(c.drift_x(100.0, 7.0, 0.0), 3.0);
    EXPECT_EQ(c.rho, -0.7);
}

TEST(Models, HestonAtZeroVariance) {
    const HestonParams p = find_set("C").params;
    const Coefficients2D c = heston_coefficients(p);
    EXPECT_EQ(c.diffusion_x(0.3, 0.0, 0.0), 0.0);
    EXPECT_EQ(c.diffusion_y(0.3, 0.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(c.drift_y(0.3, 0.0, 0.0), p.kappa * p.eta);
    EXPECT_GT(c.drift_y(0.3, 0.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(c.drift_x(0.0, 0.04, 0.0), 0.1 - 0.02);
}

TEST(Models, UnitLeverageReducesToHeston) {
    const SlvParams p = find_set("F").params;
    const Coefficients2D h = heston_coefficients(p);
    const Coefficients2D s = slv_coefficients(p, [](double, double) { return 1.0; });
    for (double x : {-1.0, 0.0, 0.7}) {
        for (double v : {0.0, 0.01, 0.3, 2.0}) {
            EXPECT_DOUBLE_EQ(s.drift_x(x, v, 0.1), h.drift_x(x, v, 0.1));
            EXPECT_DOUBLE_EQ(s.drift_y(x, v, 0.1), h.drift_y(x, v, 0.1));
            EXPECT_DOUBLE_EQ(s.diffusion_x(x, v, 0.1), h.diffusion_x(x, v, 0.1));
            EXPECT_DOUBLE_EQ(s.diffusion_y(x, v, 0.1), h.diffusion_y(x, v, 0.1));
        }
    }
    EXPECT_EQ(s.rho, h.rho);
}

TEST(Models, SlvCoefficientTranscription) {
    SlvParams p = find_set("G").params;
    const Coefficients2D s = slv_coefficients(p, [](double x, double) { return 1.0 + x; });
    EXPECT_DOUBLE_EQ(s.diffusion_x(0.5, 0.04, 0.0), 1.5 * 0.2);
    EXPECT_DOUBLE_EQ(s.drift_x(0.5, 0.04, 0.0), 0.01 - 0.5 * 2.25 * 0.04);
    p.psi_choice = PsiChoice::Linear;
    p.alpha = 1.0;
    const Coefficients2D lin = slv_coefficients(p, [](double, double) { return 2.0; });
    EXPECT_DOUBLE_EQ(lin.diffusion_x(0.0, 0.3, 0.0), 0.6);
    EXPECT_DOUBLE_EQ(lin.diffusion_y(0.0, 0.3, 0.0), 0.24 * 0.3);
}

TEST(Models, NegativeLeverageIsRejected) {
    const Coefficients2D s =
        slv_coefficients(find_set("G").params, [](double x, double) { return x; });
    EXPECT_NO_THROW(s.diffusion_x(0.1, 0.04, 0.0));
    EXPECT_THROW(s.diffusion_x(-0.1, 0.04, 0.0), ModelError);
    SlvParams bad = find_set("G").params;
    bad.xi = 0.0;
    EXPECT_THROW(slv_coefficients(bad, [](double, double) { return 1.0; }), ArgumentError);
}
