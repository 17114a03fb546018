#include "fvslv/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fvslv/errors.hpp"

namespace fvslv {

namespace {

constexpr double kSeriesLimit = 20.0;

// Ascending series sum_k (z/2)^(2k) / (k! (q+1)_k), all terms positive for q > -1.
// Rescaled on the fly so that large z cannot overflow.
double log_series(double q, double z) {
    const double x = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    double log_scale = 0.0;
    constexpr double kBig = 1e280;
    const double log_big = std::log(kBig);
    for (int k = 1; k < 100000; ++k) {
        const double kd = k;
        term *= x / (kd * (kd + q));
        sum += term;
        if (sum > kBig) {
            sum /= kBig;
            term /= kBig;
            log_scale += log_big;
        }
        if (term < sum * 1e-17 && kd > 0.5 * z) break;
    }
    return q * std::log(0.5 * z) - std::lgamma(q + 1.0) + std::log(sum) + log_scale;
}

// Large-argument expansion e^z / sqrt(2 pi z) sum_k (-1)^k a_k(q) / z^k,
// truncated at the smallest term.
double log_hankel(double q, double z) {
    const double mu = 4.0 * q * q;
    double term = 1.0;
    double sum = 1.0;
    double prev_abs = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (8.0 * k * z);
        const double a = std::abs(next);
        if (a >= prev_abs) break;
        term = next;
        sum += term;
        prev_abs = a;
        if (a < 1e-17 * std::abs(sum)) break;
    }
    return z - 0.5 * std::log(2.0 * std::numbers::pi * z) + std::log(sum);
}

}  // namespace

double log_bessel_i(double q, double z) {
    if (!(q > -1.0) || !std::isfinite(q)) throw ArgumentError("Bessel order must exceed -1");
    if (!(z >= 0.0) || std::isnan(z)) throw ArgumentError("Bessel argument must be >= 0");
    if (z == 0.0) {
        if (q == 0.0) return 0.0;
        return q > 0.0 ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity();
    }
    if (std::isinf(z)) return z;
    if (z <= kSeriesLimit || q * q > 0.5 * z) return log_series(q, z);
    return log_hankel(q, z);
}

double bessel_i(double q, double z) { return std::exp(log_bessel_i(q, z)); }

}  // namespace fvslv
