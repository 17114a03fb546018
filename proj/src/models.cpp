#include "fvslv/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fvslv/bessel.hpp"
#include "fvslv/errors.hpp"

namespace fvslv {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ArgumentError(what);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void BsParams1D::validate() const {
    require(positive(sigma), "BS volatility must be positive");
    require(positive(s0), "BS spot must be positive");
    require(std::isfinite(r_d) && std::isfinite(r_f), "BS rates must be finite");
}

void CirParams::validate() const {
    require(positive(kappa) && positive(eta) && positive(xi), "CIR kappa, eta, xi must be positive");
    require(positive(v0), "CIR v0 must be positive");
}

void Bs2dParams::validate() const {
    require(positive(sigma1) && positive(sigma2), "BS-2D volatilities must be positive");
    require(positive(s1_0) && positive(s2_0), "BS-2D spots must be positive");
    require(std::abs(rho) <= 1.0, "correlation must lie in [-1, 1]");
    require(std::isfinite(r), "BS-2D rate must be finite");
}

double SlvParams::psi(double v) const {
    v = std::max(v, 0.0);
    return psi_choice == PsiChoice::Sqrt ? std::sqrt(v) : v;
}

double SlvParams::psi_sq(double v) const {
    v = std::max(v, 0.0);
    return psi_choice == PsiChoice::Sqrt ? v : v * v;
}

void SlvParams::validate() const {
    require(positive(kappa) && positive(eta) && positive(xi), "kappa, eta, xi must be positive");
    require(positive(alpha), "alpha must be positive");
    require(std::abs(rho) <= 1.0, "correlation must lie in [-1, 1]");
    require(v0 >= 0.0 && std::isfinite(v0), "v0 must be non-negative");
    require(positive(horizon), "horizon must be positive");
    require(std::isfinite(r_d) && std::isfinite(r_f) && std::isfinite(x0),
            "rates and x0 must be finite");
}

Coefficients1D bs1d_coefficients(const BsParams1D& p) {
    p.validate();
    const double mu = p.r_d - p.r_f;
    const double sigma = p.sigma;
    return {[mu](double s, double) { return mu * s; },
            [sigma](double s, double) { return sigma * s; }};
}

double bs1d_log_density(const BsParams1D& p, double s, double tau) {
    p.validate();
    require(s > 0.0, "BS density needs s > 0");
    require(tau > 0.0, "BS density needs tau > 0");
    const double sd = p.sigma * std::sqrt(tau);
    const double z = (std::log(s / p.s0) - (p.r_d - p.r_f - 0.5 * p.sigma * p.sigma) * tau) / sd;
    return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd) - std::log(s);
}

double bs1d_exact_density(const BsParams1D& p, double s, double tau) {
    return std::exp(bs1d_log_density(p, s, tau));
}

Coefficients1D cir_coefficients(const CirParams& p) {
    p.validate();
    const double kappa = p.kappa, eta = p.eta, xi = p.xi;
    return {[kappa, eta](double v, double) { return kappa * (eta - v); },
            [xi](double v, double) { return xi * std::sqrt(std::max(v, 0.0)); }};
}

double cir_log_density(const CirParams& p, double v, double tau) {
    p.validate();
    require(v >= 0.0, "CIR density needs v >= 0");
    require(tau > 0.0, "CIR density needs tau > 0");
    const double ekt = std::exp(-p.kappa * tau);
    const double c = 2.0 * p.kappa / (p.xi * p.xi * -std::expm1(-p.kappa * tau));
    const double u0 = c * p.v0 * ekt;
    const double q = p.q();
    if (v == 0.0) {
        if (q > 0.0) return -std::numeric_limits<double>::infinity();
        if (q == 0.0) return std::log(c) - u0;
        throw EvaluationError("CIR density is not defined at v = 0 when q < 0");
    }
    const double u1 = c * v;
    return std::log(c) - u0 - u1 + 0.5 * q * (std::log(u1) - std::log(u0)) +
           log_bessel_i(q, 2.0 * std::sqrt(u0 * u1));
}

double cir_exact_density(const CirParams& p, double v, double tau) {
    return std::exp(cir_log_density(p, v, tau));
}

Coefficients2D bs2d_coefficients(const Bs2dParams& p) {
    p.validate();
    const double r = p.r, s1 = p.sigma1, s2 = p.sigma2;
    Coefficients2D c;
    c.drift_x = [r](double x, double, double) { return r * x; };
    c.drift_y = [r](double, double y, double) { return r * y; };
    c.diffusion_x = [s1](double x, double, double) { return s1 * x; };
    c.diffusion_y = [s2](double, double y, double) { return s2 * y; };
    c.rho = p.rho;
    return c;
}

double bs2d_log_density(const Bs2dParams& p, double s1, double s2, double tau) {
    p.validate();
    require(s1 > 0.0 && s2 > 0.0, "BS-2D density needs positive arguments");
    require(tau > 0.0, "BS-2D density needs tau > 0");
    require(std::abs(p.rho) < 1.0, "BS-2D density needs |rho| < 1");
    const double a1 = p.sigma1 * std::sqrt(tau);
    const double a2 = p.sigma2 * std::sqrt(tau);
    const double z1 = (std::log(s1 / p.s1_0) - (p.r - 0.5 * p.sigma1 * p.sigma1) * tau) / a1;
    const double z2 = (std::log(s2 / p.s2_0) - (p.r - 0.5 * p.sigma2 * p.sigma2) * tau) / a2;
    const double one_m = 1.0 - p.rho * p.rho;
    const double quad = (z1 * z1 - 2.0 * p.rho * z1 * z2 + z2 * z2) / one_m;
    return -0.5 * quad - std::log(2.0 * std::numbers::pi * a1 * a2 * std::sqrt(one_m)) -
           std::log(s1) - std::log(s2);
}

double bs2d_exact_density(const Bs2dParams& p, double s1, double s2, double tau) {
    return std::exp(bs2d_log_density(p, s1, s2, tau));
}

Coefficients2D heston_coefficients(const HestonParams& p) {
    p.validate();
    const double drift = p.r_d - p.r_f;
    const double kappa = p.kappa, eta = p.eta, xi = p.xi;
    Coefficients2D c;
    c.drift_x = [drift](double, double v, double) { return drift - 0.5 * std::max(v, 0.0); };
    c.drift_y = [kappa, eta](double, double v, double) { return kappa * (eta - v); };
    c.diffusion_x = [](double, double v, double) { return std::sqrt(std::max(v, 0.0)); };
    c.diffusion_y = [xi](double, double v, double) { return xi * std::sqrt(std::max(v, 0.0)); };
    c.rho = p.rho;
    return c;
}

Coefficients2D slv_coefficients(const SlvParams& p, LeverageFn leverage) {
    p.validate();
    auto checked = [leverage = std::move(leverage)](double x, double tau) {
        const double l = leverage(x, tau);
        if (l < 0.0) {
            throw ModelError("negative leverage at x=" + std::to_string(x) +
                             ", tau=" + std::to_string(tau));
        }
        return l;
    };
    const double drift = p.r_d - p.r_f;
    const double kappa = p.kappa, eta = p.eta, xi = p.xi, alpha = p.alpha;
    Coefficients2D c;
    c.drift_x = [p, drift, checked](double x, double v, double tau) {
        const double l = checked(x, tau);
        return drift - 0.5 * l * l * p.psi_sq(v);
    };
    c.drift_y = [kappa, eta](double, double v, double) { return kappa * (eta - v); };
    c.diffusion_x = [p, checked](double x, double v, double tau) {
        return checked(x, tau) * p.psi(v);
    };
    c.diffusion_y = [xi, alpha](double, double v, double) {
        return xi * std::pow(std::max(v, 0.0), alpha);
    };
    c.rho = p.rho;
    return c;
}

}  // namespace fvslv
