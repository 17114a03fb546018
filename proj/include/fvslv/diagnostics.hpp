#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fvslv/grid.hpp"

namespace fvslv {

struct MixedErrorReport {
    std::vector<double> errors;  // per entry; zero outside the filter
    double max_error = 0.0;
    std::size_t argmax = 0;
    std::size_t j1 = 0;  // lowest v-index included, when a v_low cut was applied
    double crossover = 1.0;
};

/// Per-entry error |ref - num| / |ref| where |ref| > crossover, |ref - num|
/// otherwise. The maximum is taken over entries accepted by filter (all if empty).
MixedErrorReport mixed_error(std::span<const double> reference, std::span<const double> numeric,
                             double crossover = 1.0,
                             const std::function<bool(std::size_t)>& filter = {});

/// Same on a column-stacked m1 x m2 field, skipping v-columns j < j1.
MixedErrorReport mixed_error_2d(std::span<const double> reference,
                                std::span<const double> numeric, std::size_t m1,
                                std::size_t j1, double crossover = 1.0);

/// Index of the first node of grid_v at or above v_low, the second node of the
/// same grid family rebuilt with coarse_m nodes.
std::size_t v_low_filter(const NonUniformGrid& grid_v, std::size_t coarse_m = 50);

struct OrderFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Local slopes between consecutive points spread by more than 0.3.
    bool mixed_regime = false;
};

/// Least-squares slope of log(error) against log(1/m).
OrderFit convergence_order(std::span<const double> ms, std::span<const double> errors);

/// exp(-r_d T) sum_i w_i p_i payoff(x_i).
double fair_value(std::span<const double> density, const std::function<double(double)>& payoff,
                  double r_d, double horizon, const NonUniformGrid& grid_x);

double bs_call_price(double s0, double strike, double r_d, double r_f, double horizon,
                     double sigma);

/// Black-Scholes implied volatility of a call, in percent.
/// Throws InversionError outside the no-arbitrage bounds.
double implied_vol(double price, double s0, double strike, double r_d, double r_f,
                   double horizon);

}  // namespace fvslv
