#include "fvslv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "fvslv/errors.hpp"

namespace fvslv {

MixedErrorReport mixed_error(std::span<const double> reference, std::span<const double> numeric,
                             double crossover, const std::function<bool(std::size_t)>& filter) {
    if (reference.size() != numeric.size()) throw ArgumentError("mixed_error: shape mismatch");
    if (!(crossover > 0.0)) throw ArgumentError("mixed_error: crossover must be positive");
    MixedErrorReport r;
    r.crossover = crossover;
    r.errors.assign(reference.size(), 0.0);
    for (std::size_t k = 0; k < reference.size(); ++k) {
        if (filter && !filter(k)) continue;
        const double ref = std::abs(reference[k]);
        const double diff = std::abs(reference[k] - numeric[k]);
        const double e = ref > crossover ? diff / ref : diff;
        r.errors[k] = e;
        if (e > r.max_error || std::isnan(e)) {
            r.max_error = e;
            r.argmax = k;
        }
    }
    return r;
}

MixedErrorReport mixed_error_2d(std::span<const double> reference,
                                std::span<const double> numeric, std::size_t m1,
                                std::size_t j1, double crossover) {
    if (m1 == 0 || reference.size() % m1 != 0) throw ArgumentError("mixed_error_2d: bad shape");
    MixedErrorReport r = mixed_error(reference, numeric, crossover,
                                     [m1, j1](std::size_t k) { return k / m1 >= j1; });
    r.j1 = j1;
    return r;
}

std::size_t v_low_filter(const NonUniformGrid& grid_v, std::size_t coarse_m) {
    const NonUniformGrid coarse = rebuild(grid_v, coarse_m);
    const double v_low = coarse.node(1);
    const auto nodes = grid_v.nodes();
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), v_low);
    return static_cast<std::size_t>(it - nodes.begin());
}

OrderFit convergence_order(std::span<const double> ms, std::span<const double> errors) {
    if (ms.size() != errors.size()) throw ArgumentError("convergence_order: size mismatch");
    if (ms.size() < 3) throw ArgumentError("convergence_order needs at least 3 points");
    const std::size_t n = ms.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(errors[k] > 0.0) || !(ms[k] > 0.0)) {
            throw ArgumentError("convergence_order needs positive errors and sizes");
        }
        lx[k] = -std::log(ms[k]);
        ly[k] = std::log(errors[k]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (sxx == 0.0) throw ArgumentError("convergence_order needs distinct sizes");
    OrderFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 1; k < n; ++k) {
        const double s = (ly[k] - ly[k - 1]) / (lx[k] - lx[k - 1]);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    fit.mixed_regime = hi - lo > 0.3;
    return fit;
}

double fair_value(std::span<const double> density, const std::function<double(double)>& payoff,
                  double r_d, double horizon, const NonUniformGrid& grid_x) {
    if (density.size() != grid_x.size()) throw ArgumentError("fair_value: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        sum += grid_x.weight(i) * density[i] * payoff(grid_x.node(i));
    }
    return std::exp(-r_d * horizon) * sum;
}

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double bs_call_price(double s0, double strike, double r_d, double r_f, double horizon,
                     double sigma) {
    const double df_d = std::exp(-r_d * horizon);
    const double df_f = std::exp(-r_f * horizon);
    const double sd = sigma * std::sqrt(horizon);
    if (!(sd > 0.0)) return std::max(s0 * df_f - strike * df_d, 0.0);
    const double d1 = (std::log(s0 / strike) + (r_d - r_f) * horizon) / sd + 0.5 * sd;
    const double d2 = d1 - sd;
    return s0 * df_f * norm_cdf(d1) - strike * df_d * norm_cdf(d2);
}

double implied_vol(double price, double s0, double strike, double r_d, double r_f,
                   double horizon) {
    if (!(s0 > 0.0) || !(strike > 0.0) || !(horizon > 0.0)) {
        throw InversionError("implied_vol: spot, strike and horizon must be positive");
    }
    const double lower = std::max(s0 * std::exp(-r_f * horizon) - strike * std::exp(-r_d * horizon), 0.0);
    const double upper = s0 * std::exp(-r_f * horizon);
    if (!(price > lower) || !(price < upper)) {
        throw InversionError("call price " + std::to_string(price) +
                             " outside the no-arbitrage bounds (" + std::to_string(lower) + ", " +
                             std::to_string(upper) + ")");
    }
    auto f = [&](double sigma) {
        return bs_call_price(s0, strike, r_d, r_f, horizon, sigma) - price;
    };
    double lo = 1e-6;
    double hi = 1.0;
    if (f(lo) >= 0.0) return 100.0 * lo;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e3) throw InversionError("implied_vol: no volatility reproduces the price");
    }
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    return 100.0 * 0.5 * (a + b);
}

}  // namespace fvslv
