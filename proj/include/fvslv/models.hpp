#pragma once

#include <functional>

#include "fvslv/fv1d.hpp"
#include "fvslv/fv2d.hpp"

namespace fvslv {

/// dS = (r_d - r_f) S dt + sigma S dW.
struct BsParams1D {
    double r_d = 0.0;
    double r_f = 0.0;
    double sigma = 0.2;
    double s0 = 100.0;

    void validate() const;
};

/// dV = kappa (eta - V) dt + xi sqrt(V) dW.
struct CirParams {
    double kappa = 1.0;
    double eta = 0.04;
    double xi = 0.3;
    double v0 = 0.04;

    /// 2 kappa eta / xi^2 - 1; zero is attainable when q < 0.
    double q() const { return 2.0 * kappa * eta / (xi * xi) - 1.0; }
    void validate() const;
};

/// Two correlated geometric Brownian motions with common rate r.
struct Bs2dParams {
    double r = 0.0;
    double sigma1 = 0.2;
    double sigma2 = 0.2;
    double rho = 0.0;
    double s1_0 = 100.0;
    double s2_0 = 100.0;

    void validate() const;
};

enum class PsiChoice { Sqrt, Linear };

/**
 * dX = (r_d - r_f - sigma_slv^2 psi(V)^2 / 2) dt + sigma_slv(X, t) psi(V) dW1
 * dV = kappa (eta - V) dt + xi V^alpha dW2,   d<W1, W2> = rho dt
 * with X = log S. Leverage 1, psi = sqrt and alpha = 1/2 is the Heston model.
 */
struct SlvParams {
    double kappa = 1.0;
    double eta = 0.04;
    double xi = 0.3;
    double rho = 0.0;
    double r_d = 0.0;
    double r_f = 0.0;
    double x0 = 0.0;
    double v0 = 0.04;
    double horizon = 1.0;
    double alpha = 0.5;
    PsiChoice psi_choice = PsiChoice::Sqrt;

    double q() const { return 2.0 * kappa * eta / (xi * xi) - 1.0; }
    bool zero_attainable() const { return q() < 0.0; }
    double psi(double v) const;
    double psi_sq(double v) const;
    CirParams variance() const { return {kappa, eta, xi, v0}; }
    void validate() const;
};

using HestonParams = SlvParams;

/// Leverage function sigma_slv(x, tau).
using LeverageFn = std::function<double(double x, double tau)>;

Coefficients1D bs1d_coefficients(const BsParams1D& p);
double bs1d_exact_density(const BsParams1D& p, double s, double tau);
double bs1d_log_density(const BsParams1D& p, double s, double tau);

Coefficients1D cir_coefficients(const CirParams& p);
/// Transition density of V at v after time tau, started from v0.
double cir_exact_density(const CirParams& p, double v, double tau);
double cir_log_density(const CirParams& p, double v, double tau);

Coefficients2D bs2d_coefficients(const Bs2dParams& p);
double bs2d_exact_density(const Bs2dParams& p, double s1, double s2, double tau);
double bs2d_log_density(const Bs2dParams& p, double s1, double s2, double tau);

Coefficients2D heston_coefficients(const HestonParams& p);
Coefficients2D slv_coefficients(const SlvParams& p, LeverageFn leverage);

}  // namespace fvslv
